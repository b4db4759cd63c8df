#![allow(dead_code)]

use timeline_kit::synth::{self, EventDatum, SpecConstraints};
use timeline_kit::AnnotatedTimeline;

/// The first `n` seeds from `start` that produce a valid timeline.
pub fn corpus(
    start: u64,
    n: usize,
    constraints: Option<&SpecConstraints>,
) -> Vec<(AnnotatedTimeline, Vec<EventDatum>)> {
    (start..)
        .filter_map(|s| {
            let spec = synth::sample_spec(s, constraints).ok()?;
            let data = synth::sample_data(&spec, s).ok()?;
            Some((synth::generate(&spec, &data, s).ok()?, data))
        })
        .take(n)
        .collect()
}
