//! Time-to-pixel scales and the row split used by faceted and segmented
//! layouts. Shared by the synthetic generator and the renderer so that a
//! template re-rendered with its own data lands on the same pixels.

use crate::error::{Error, Result};
use crate::model::{Layout, ScaleKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain<'a> {
    /// Continuous time interval `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
    /// `n` ordinal positions; values are indices.
    Count(usize),
    /// The full event sequence; values are indices into it for ordinal
    /// scales and times for continuous ones.
    Times(&'a [f64]),
}

impl Domain<'_> {
    fn interval(&self) -> Result<(f64, f64)> {
        match *self {
            Domain::Interval { lo, hi } => Ok((lo, hi)),
            Domain::Count(n) => Ok((0.0, n.saturating_sub(1) as f64)),
            Domain::Times(ts) => {
                let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo.is_finite() && hi.is_finite() {
                    Ok((lo, hi))
                } else {
                    Err(Error::Domain { value: f64::NAN, lo, hi })
                }
            }
        }
    }

    fn len(&self) -> Option<usize> {
        match *self {
            Domain::Interval { .. } => None,
            Domain::Count(n) => Some(n),
            Domain::Times(ts) => Some(ts.len()),
        }
    }
}

fn index_of(t: f64, n: usize) -> Result<usize> {
    if n == 0 || t < 0.0 || t.fract() != 0.0 || t as usize >= n {
        return Err(Error::Domain { value: t, lo: 0.0, hi: n.saturating_sub(1) as f64 });
    }
    Ok(t as usize)
}

/// Pixel offset of `t` along an axis of length `range_px`.
///
/// Continuous scales take a time; ordinal scales take an index.
pub fn scale_position(t: f64, kind: ScaleKind, domain: &Domain, range_px: f64) -> Result<f64> {
    match kind {
        ScaleKind::Chronological | ScaleKind::Relative | ScaleKind::Logarithmic => {
            let (lo, hi) = domain.interval()?;
            if !(t >= lo && t <= hi) {
                return Err(Error::Domain { value: t, lo, hi });
            }
            if hi == lo {
                return Ok(0.0);
            }
            let frac = match kind {
                ScaleKind::Logarithmic => (t - lo + 1.0).ln() / (hi - lo + 1.0).ln(),
                // relative is linear in elapsed time since the first event
                _ => (t - lo) / (hi - lo),
            };
            Ok(frac * range_px)
        }
        ScaleKind::Sequential => {
            let n = domain.len().ok_or_else(|| Error::Domain { value: t, lo: 0.0, hi: 0.0 })?;
            let i = index_of(t, n)?;
            Ok(if n == 1 { 0.0 } else { range_px * i as f64 / (n - 1) as f64 })
        }
        ScaleKind::SequentialInterim => {
            let Domain::Times(ts) = domain else {
                return scale_position(t, ScaleKind::Sequential, domain, range_px);
            };
            let n = ts.len();
            let i = index_of(t, n)?;
            if n == 1 {
                return Ok(0.0);
            }
            let span = ts[n - 1] - ts[0];
            let seq = i as f64 / (n - 1) as f64;
            let elapsed = if span > 0.0 { (ts[i] - ts[0]) / span } else { seq };
            // half of the axis is spent on uniform steps, half on durations
            Ok(range_px * (0.5 * seq + 0.5 * elapsed))
        }
    }
}

/// Positions for a whole event sequence in data order.
pub fn positions(kind: ScaleKind, times: &[f64], range_px: f64) -> Result<Vec<f64>> {
    let domain = Domain::Times(times);
    times
        .iter()
        .enumerate()
        .map(|(i, &t)| match kind {
            ScaleKind::Sequential | ScaleKind::SequentialInterim => scale_position(i as f64, kind, &domain, range_px),
            _ => scale_position(t, kind, &domain, range_px),
        })
        .collect()
}

/// Normalized position in `[0, 1]` back to a time, for the continuous
/// scales over `[lo, hi]`. Used to sample data with guaranteed spacing.
pub fn invert_fraction(frac: f64, kind: ScaleKind, lo: f64, hi: f64) -> f64 {
    match kind {
        ScaleKind::Logarithmic => lo + ((hi - lo + 1.0).ln() * frac).exp() - 1.0,
        _ => lo + frac * (hi - lo),
    }
}

/// Event indices per row, rows in drawing order (top-to-bottom or
/// left-to-right). Empty rows are dropped.
pub fn layout_rows(layout: Layout, n: usize) -> Vec<Vec<usize>> {
    fn halves(items: Vec<usize>) -> Vec<Vec<usize>> {
        let cut = items.len().div_ceil(2);
        let (a, b) = items.split_at(cut);
        vec![a.to_vec(), b.to_vec()]
    }
    let all: Vec<usize> = (0..n).collect();
    let evens: Vec<usize> = all.iter().copied().filter(|i| i % 2 == 0).collect();
    let odds: Vec<usize> = all.iter().copied().filter(|i| i % 2 == 1).collect();
    let rows = match layout {
        Layout::Unified => vec![all],
        Layout::Segmented => halves(all),
        Layout::Faceted => vec![evens, odds],
        Layout::FacetedSegmented => {
            let mut rows = halves(evens);
            rows.extend(halves(odds));
            rows
        }
    };
    rows.into_iter().filter(|r| !r.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn chronological_midpoint() {
        let d = Domain::Interval { lo: 2000.0, hi: 2010.0 };
        assert!(close(scale_position(2005.0, ScaleKind::Chronological, &d, 500.0).unwrap(), 250.0));
        assert!(matches!(scale_position(2011.0, ScaleKind::Chronological, &d, 500.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn sequential_endpoints() {
        let d = Domain::Count(5);
        assert!(close(scale_position(0.0, ScaleKind::Sequential, &d, 500.0).unwrap(), 0.0));
        assert!(close(scale_position(4.0, ScaleKind::Sequential, &d, 500.0).unwrap(), 500.0));
        assert!(scale_position(5.0, ScaleKind::Sequential, &d, 500.0).is_err());
    }

    #[test]
    fn logarithmic_closed_form() {
        let d = Domain::Interval { lo: 0.0, hi: 99.0 };
        let expected = 100.0 * 10f64.log10() / 100f64.log10();
        assert!(close(expected, 50.0));
        assert!(close(scale_position(9.0, ScaleKind::Logarithmic, &d, 100.0).unwrap(), expected));
    }

    #[test]
    fn interim_gaps_follow_durations() {
        let ts = [0.0, 1.0, 9.0];
        let p = positions(ScaleKind::SequentialInterim, &ts, 100.0).unwrap();
        assert!(close(p[0], 0.0) && close(p[2], 100.0));
        // uniform half gives 25, elapsed half gives 0.5 * 100 / 9
        assert!(close(p[1], 25.0 + 50.0 / 9.0));
    }

    #[test]
    fn inversion_matches_scale() {
        for kind in [ScaleKind::Chronological, ScaleKind::Logarithmic] {
            for frac in [0.0, 0.3, 0.77, 1.0] {
                let t = invert_fraction(frac, kind, 10.0, 500.0);
                let d = Domain::Interval { lo: 10.0, hi: 500.0 };
                assert!(close(scale_position(t, kind, &d, 1.0).unwrap(), frac));
            }
        }
    }

    #[test]
    fn rows_partition_events() {
        for layout in Layout::ALL {
            for n in 1..20 {
                let rows = layout_rows(*layout, n);
                let mut all: Vec<usize> = rows.concat();
                all.sort();
                assert_eq!(all, (0..n).collect::<Vec<_>>());
            }
        }
        assert_eq!(layout_rows(Layout::FacetedSegmented, 8), vec![vec![0, 2], vec![4, 6], vec![1, 3], vec![5, 7]]);
    }
}
