use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use timeline_kit::detsim::{self, load_detections, save_detections};
use timeline_kit::eval::{self, load_config, PipelineConfig};
use timeline_kit::model::{AnnotatedTimeline, GlobalInfo, Layout, Orientation, Representation, ScaleKind};
use timeline_kit::reconstruct::reconstruct;
use timeline_kit::render::{self, RenderJob, RenderOptions};
use timeline_kit::segment::refine_all;
use timeline_kit::synth::{self, sidecar, EventDatum, SpecConstraints};
use timeline_kit::template::{self, ExternalCommand, ExtractOptions};

#[derive(Parser)]
#[command(name = "timeline-kit", version, about = "Timeline deconstruction and regeneration toolkit")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pipeline config (.toml or .json); defaults to the standard profile.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log intermediate results to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Generate synthetic timelines with ground truth sidecars.
    SynthGen(SynthGen),
    /// Simulate a noisy detector on an annotated timeline.
    DetectSim(DetectSim),
    /// Deduplicate and repair a detection file.
    Reconstruct(Reconstruct),
    /// Build a template from an image and its detections.
    Extract(Extract),
    /// Render a timeline from a template and event data.
    Render(Render),
    /// Score detections, or report per-stage gains over a corpus.
    Evaluate(Evaluate),
    /// Detect, reconstruct, extract and re-render one annotated timeline.
    Pipeline(Pipeline),
}

#[derive(Args)]
struct SynthGen {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    representation: Option<Representation>,
    #[arg(long)]
    scale: Option<ScaleKind>,
    #[arg(long)]
    layout: Option<Layout>,
    #[arg(long)]
    orientation: Option<Orientation>,
    #[arg(long)]
    events: Option<usize>,
}

#[derive(Args)]
struct DetectSim {
    /// Sidecar JSON of the annotated timeline.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Reconstruct {
    #[arg(long)]
    detections: PathBuf,
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Skip orientation inference.
    #[arg(long)]
    orientation: Option<Orientation>,
    /// Refine masks and boxes with GrabCut afterwards.
    #[arg(long)]
    refine: bool,
}

#[derive(Args)]
struct GlobalArgs {
    /// Take the global design from this sidecar.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    representation: Option<Representation>,
    #[arg(long)]
    scale: Option<ScaleKind>,
    #[arg(long)]
    layout: Option<Layout>,
    #[arg(long)]
    orientation: Option<Orientation>,
}

fn pick<T>(flag: Option<T>, from: Option<T>, name: &str) -> Result<T> {
    match flag.or(from) {
        Some(v) => Ok(v),
        None => bail!("--{name} is required without --sidecar"),
    }
}

impl GlobalArgs {
    fn resolve(&self) -> Result<GlobalInfo> {
        let base = match &self.sidecar {
            Some(p) => Some(read_sidecar(p)?.global),
            None => None,
        };
        let g = GlobalInfo::new(
            pick(self.representation, base.map(|b| b.representation), "representation")?,
            pick(self.scale, base.map(|b| b.scale), "scale")?,
            pick(self.layout, base.map(|b| b.layout), "layout")?,
            pick(self.orientation, base.map(|b| b.orientation), "orientation")?,
        )?;
        Ok(g)
    }
}

#[derive(Args)]
struct Extract {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    detections: PathBuf,
    #[command(flatten)]
    global: GlobalArgs,
    #[arg(long)]
    out: PathBuf,
    /// Refine reusable elements with GrabCut first.
    #[arg(long)]
    refine: bool,
    /// Command that prints the text in a PNG given as its last argument.
    #[arg(long)]
    ocr: Option<String>,
    /// Command that prints the font family of a PNG given as its last argument.
    #[arg(long)]
    font_matcher: Option<String>,
}

#[derive(Args)]
struct Render {
    #[arg(long)]
    template: PathBuf,
    /// JSON list of `{"time", "label", "icon"}` records.
    #[arg(long)]
    data: PathBuf,
    /// Output path without extension; `.svg` and `.png` are written.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    #[arg(long)]
    scale: Option<ScaleKind>,
    /// Place events at this template's slot positions.
    #[arg(long)]
    positions_from: Option<PathBuf>,
    /// Fail instead of reusing slots when data outnumbers them.
    #[arg(long)]
    no_loop: bool,
}

#[derive(Args)]
struct Evaluate {
    /// Detection file to score against --truth.
    #[arg(long, requires = "truth")]
    detections: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Count recovered detections as predictions.
    #[arg(long)]
    include_recovered: bool,
    /// Gain report over every sidecar in this directory.
    #[arg(long, conflicts_with_all = ["detections", "synthetic"])]
    corpus: Option<PathBuf>,
    /// Gain report over this many freshly generated timelines.
    #[arg(long, conflicts_with = "detections")]
    synthetic: Option<usize>,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Output path; gain reports write `<out>.csv` and `<out>.txt`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Pipeline {
    /// Sidecar JSON of the annotated timeline.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Data to render; defaults to the data stored in the sidecar.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Start from the ground truth instead of simulated detections.
    #[arg(long)]
    perfect: bool,
}

struct Ctx {
    seed: u64,
    config: PipelineConfig,
    trace: bool,
}

impl Ctx {
    fn log(&self, msg: impl FnOnce() -> String) {
        if self.trace {
            eprintln!("{}", msg());
        }
    }
}

fn read_sidecar(path: &Path) -> Result<AnnotatedTimeline> {
    Ok(sidecar::read(path).with_context(|| format!("reading {}", path.display()))?.0)
}

fn read_data(path: &Path) -> Result<Vec<EventDatum>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(timeline_kit::json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn command(spec: &str) -> Result<ExternalCommand> {
    let mut parts = spec.split_whitespace().map(String::from);
    let program = parts.next().context("empty command")?;
    Ok(ExternalCommand { program, args: parts.collect() })
}

fn synthesize(constraints: &SpecConstraints, seed: u64, count: usize) -> Vec<(AnnotatedTimeline, Vec<EventDatum>)> {
    (seed..)
        .filter_map(|s| {
            let spec = synth::sample_spec(s, Some(constraints)).ok()?;
            let data = synth::sample_data(&spec, s).ok()?;
            Some((synth::generate(&spec, &data, s).ok()?, data))
        })
        .take(count)
        .collect()
}

fn synth_gen(ctx: &Ctx, a: &SynthGen) -> Result<()> {
    let c = SpecConstraints {
        representation: a.representation,
        scale: a.scale,
        layout: a.layout,
        orientation: a.orientation,
        n_events: a.events,
        schema: None,
    };
    for (i, (t, data)) in synthesize(&c, ctx.seed, a.count).iter().enumerate() {
        let (png, _) = sidecar::write(&a.out, &format!("timeline_{i:04}"), t, Some(data))?;
        ctx.log(|| format!("{}: {:?}, {} events", png.display(), t.global, t.events.len()));
    }
    Ok(())
}

fn detect_sim(ctx: &Ctx, a: &DetectSim) -> Result<()> {
    let t = read_sidecar(&a.truth)?;
    let dets = detsim::perturb(&t, &ctx.config.noise, ctx.seed)?;
    ctx.log(|| format!("{} elements -> {} detections", t.elements.len(), dets.len()));
    let image = a.truth.with_extension("png");
    save_detections(&a.out, &image.to_string_lossy(), &dets)?;
    Ok(())
}

fn reconstruct_verb(ctx: &Ctx, a: &Reconstruct) -> Result<()> {
    let (name, dets) = load_detections(&a.detections)?;
    let image = image::open(&a.image)?.to_rgb8();
    let r = reconstruct(&dets, image.dimensions(), a.orientation, &ctx.config.reconstruct)?;
    ctx.log(|| {
        format!(
            "raw {} -> dedup {} ({:?}) -> repaired {}, {} events, orientation {:?}",
            r.raw.len(),
            r.deduplicated.len(),
            r.dedup_choice,
            r.repaired.len(),
            r.clusters.len(),
            r.orientation
        )
    });
    let out = if a.refine { refine_all(&image, &r.repaired, &ctx.config.refine) } else { r.repaired };
    save_detections(&a.out, &name, &out)?;
    Ok(())
}

fn extract(ctx: &Ctx, a: &Extract) -> Result<()> {
    let global = a.global.resolve()?;
    let image = image::open(&a.image)?.to_rgb8();
    let (_, dets) = load_detections(&a.detections)?;
    let opts = ExtractOptions {
        refine: a.refine.then_some(ctx.config.refine),
        font_family: a.font_matcher.as_deref().map(command).transpose()?,
        ocr: a.ocr.as_deref().map(command).transpose()?,
    };
    let doc = template::extract_template_with(&image, global, &dets, &opts)?;
    ctx.log(|| {
        format!(
            "{} reusable, {} updatable, {} event slots",
            doc.reusable.len(),
            doc.updatable.len(),
            doc.event_slots.len()
        )
    });
    template::save_template(&a.out, &doc)?;
    Ok(())
}

fn write_rendered(out: &Path, r: &render::Rendered) -> Result<()> {
    write_text(&out.with_extension("svg"), &r.svg)?;
    r.image.save(out.with_extension("png"))?;
    Ok(())
}

fn render_verb(ctx: &Ctx, a: &Render) -> Result<()> {
    let doc = template::load_template(&a.template)?;
    let canvas = match (a.width, a.height) {
        (None, None) => None,
        (w, h) => Some((w.unwrap_or(doc.canvas.0), h.unwrap_or(doc.canvas.1))),
    };
    let source = a.positions_from.as_deref().map(template::load_template).transpose()?;
    let job = RenderJob {
        template: doc,
        data: read_data(&a.data)?,
        options: RenderOptions {
            canvas,
            scale: a.scale,
            representation_source: source.map(Box::new),
            loop_slots: !a.no_loop,
        },
    };
    let r = render::render(&job)?;
    ctx.log(|| format!("{} elements drawn", r.elements.len()));
    write_rendered(&a.out, &r)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn evaluate(ctx: &Ctx, a: &Evaluate) -> Result<()> {
    if let (Some(dets), Some(truth)) = (&a.detections, &a.truth) {
        let t = read_sidecar(truth)?;
        let (_, preds) = load_detections(dets)?;
        let e = eval::evaluate(&preds, &t.elements, a.include_recovered)?;
        return emit(a.out.as_deref(), &e.to_text());
    }
    let corpus: Vec<AnnotatedTimeline> = if let Some(dir) = &a.corpus {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("listing {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        paths.iter().map(|p| read_sidecar(p)).collect::<Result<_>>()?
    } else if let Some(n) = a.synthetic {
        synthesize(&SpecConstraints::default(), ctx.seed, n).into_iter().map(|(t, _)| t).collect()
    } else {
        bail!("give --detections and --truth, --corpus, or --synthetic");
    };
    if corpus.is_empty() {
        bail!("the corpus is empty");
    }
    ctx.log(|| format!("{} timelines, {} runs", corpus.len(), a.runs));
    let report = eval::gain_report(&corpus, &ctx.config.noise, &ctx.config, a.runs, ctx.seed)?;
    match &a.out {
        Some(p) => {
            write_text(&p.with_extension("csv"), &report.to_csv())?;
            write_text(&p.with_extension("txt"), &report.to_table())
        }
        None => {
            print!("{}\n{}", report.to_table(), report.to_csv());
            Ok(())
        }
    }
}

fn pipeline(ctx: &Ctx, a: &Pipeline) -> Result<()> {
    let (t, stored) = sidecar::read(&a.truth).with_context(|| format!("reading {}", a.truth.display()))?;
    let data = match (&a.data, stored) {
        (Some(p), _) => read_data(p)?,
        (None, Some(d)) => d,
        (None, None) => bail!("the sidecar holds no data; pass --data"),
    };
    let dets = if a.perfect { t.perfect_detections(1.0) } else { detsim::perturb(&t, &ctx.config.noise, ctx.seed)? };
    let image_name = a.truth.with_extension("png").to_string_lossy().into_owned();
    fs::create_dir_all(&a.out)?;
    save_detections(&a.out.join("detections.raw.json"), &image_name, &dets)?;

    let stages =
        eval::stage_outputs(&t.image, &dets, Some(t.global.orientation), &ctx.config.reconstruct, &ctx.config.refine)?;
    let mut report = String::new();
    for (stage, d) in eval::Stage::ALL.iter().zip(&stages) {
        let e = eval::evaluate(d, &t.elements, true)?;
        report.push_str(&format!("[{}] {} detections\n{}", stage.label(), d.len(), e.to_text()));
    }
    let refined = &stages[3];
    save_detections(&a.out.join("detections.json"), &image_name, refined)?;
    ctx.log(|| format!("{} detections after refinement", refined.len()));

    let doc = template::extract_template(&t.image, t.global, refined)?;
    template::save_template(&a.out.join("template.json"), &doc)?;
    let r = render::render(&RenderJob::new(doc, data))?;
    write_rendered(&a.out.join("render"), &r)?;
    match render::bbox_deviation(&t, &r.elements) {
        Some(dev) => report.push_str(&format!("render max bbox deviation {dev} px\n")),
        None => report.push_str("render element counts differ from the source\n"),
    }
    write_text(&a.out.join("report.txt"), &report)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global()?;
    let config = match &cli.config {
        Some(p) => load_config(p)?,
        None => PipelineConfig::standard(),
    };
    let ctx = Ctx { seed: cli.seed, config, trace: cli.trace };
    match &cli.verb {
        Verb::SynthGen(a) => synth_gen(&ctx, a),
        Verb::DetectSim(a) => detect_sim(&ctx, a),
        Verb::Reconstruct(a) => reconstruct_verb(&ctx, a),
        Verb::Extract(a) => extract(&ctx, a),
        Verb::Render(a) => render_verb(&ctx, a),
        Verb::Evaluate(a) => evaluate(&ctx, a),
        Verb::Pipeline(a) => pipeline(&ctx, a),
    }
}
