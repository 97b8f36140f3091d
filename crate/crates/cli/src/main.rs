use std::error::Error as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use srg_core::evaluation::Palette;
use srg_core::graph::{format_graph, read_model, write_model, RegionTable};
use srg_core::io::{load_labels, load_scalar, save_auto, save_volume, VolumeFormat};
use srg_core::matching::{
    evaluate_table, exhaustive_best, format_assignment, format_match_report, parse_assignment,
    parse_profiles, sweep_weights, table1_profiles, EdgeWeights, VertexWeights,
    DEFAULT_EXHAUSTIVE_CAP,
};
use srg_core::pipeline::{
    evaluate_segmentation, load_weights, match_super, MatchOutcome, SupersegParams,
};
use srg_core::superseg::supersegment;
use srg_core::{
    build_srg, generate_phantom, render_overlay, run_pipeline, Axis, CostWeights, DistanceSpec,
    Element, Model, PhantomSpec, PipelineConfig, Result, SrgError,
};

/// Statistical-relational graph segmentation of 3D volumes.
#[derive(Parser)]
#[command(name = "srg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthetic annotated volumes.
    #[command(subcommand)]
    Phantom(PhantomCommand),
    /// Over-segment a volume with a gradient watershed.
    Superseg(SupersegArgs),
    /// Fit a model graph from annotated volumes.
    BuildModel(BuildModelArgs),
    /// Assign super-regions to model structures.
    Match(MatchArgs),
    /// Greedy solutions over a list of vertex weight profiles.
    Sweep(SweepArgs),
    /// Dice scores of a segmentation against ground truth.
    Eval(EvalArgs),
    /// Slice overlay as PNG.
    Render(RenderArgs),
    /// Every stage from super-segmentation to reports.
    Pipeline(PipelineArgs),
}

#[derive(Subcommand)]
enum PhantomCommand {
    /// Rasterize a phantom spec.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        scalar: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Overrides the spec's noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Randomly translate each structure and redraw the noise.
    Perturb {
        #[arg(long)]
        spec: PathBuf,
        /// Largest shift per axis, in mm.
        #[arg(long)]
        max_shift: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        scalar: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Where to save the perturbed spec.
        #[arg(long)]
        spec_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SupersegArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = SupersegParams::default().min_depth)]
    min_depth: f64,
    #[arg(long, default_value_t = Element::Cross6)]
    element: Element,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildModelArgs {
    /// Training intensities, paired in order with `--labels`.
    #[arg(long, required = true)]
    scalar: Vec<PathBuf>,
    #[arg(long, required = true)]
    labels: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Leave label 0 out of the model.
    #[arg(long)]
    no_background: bool,
}

#[derive(Args)]
struct WeightArgs {
    /// Pipeline config whose `[weights]` table is the starting point.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: WeightOverrides,
}

#[derive(Args)]
struct WeightOverrides {
    #[arg(long)]
    alpha: Option<f64>,
    /// centroid,intensity,volume
    #[arg(long)]
    vweights: Option<VertexWeights>,
    /// centroid_vector,volume_ratio,contrast
    #[arg(long)]
    eweights: Option<EdgeWeights>,
    #[arg(long)]
    empty_penalty: Option<f64>,
}

impl WeightOverrides {
    fn apply(&self, mut w: CostWeights) -> Result<CostWeights> {
        if let Some(a) = self.alpha {
            w.alpha = a;
        }
        if let Some(v) = self.vweights {
            w.vertex = v;
        }
        if let Some(e) = self.eweights {
            w.edge = e;
        }
        if let Some(p) = self.empty_penalty {
            w.empty_penalty = p;
        }
        w.validate()?;
        Ok(w)
    }
}

impl WeightArgs {
    fn resolve(&self) -> Result<CostWeights> {
        let base = match &self.config {
            Some(p) => load_weights(p)?,
            None => CostWeights::default(),
        };
        self.overrides.apply(base)
    }
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    scalar: PathBuf,
    #[arg(long = "super")]
    super_labels: PathBuf,
    #[command(flatten)]
    weights: WeightArgs,
    /// Evaluate this assignment (1-based model indices) instead of the greedy one.
    #[arg(long, conflicts_with = "exhaustive")]
    assignment: Option<PathBuf>,
    /// Enumerate every assignment and keep the cheapest.
    #[arg(long)]
    exhaustive: bool,
    /// Limit on the number of assignments enumerated.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    cap: u128,
    /// Segmentation volume.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    assignment_out: Option<PathBuf>,
    /// Joined observation graph.
    #[arg(long)]
    obs: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    scalar: PathBuf,
    #[arg(long = "super")]
    super_labels: PathBuf,
    /// Lines of `centroid,intensity[,volume]`; the nine standard pairs when absent.
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    scalar: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = Axis::Z)]
    axis: Axis,
    /// Slice index; the middle slice when absent.
    #[arg(long)]
    index: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML pipeline config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    scalar: Option<PathBuf>,
    #[arg(long = "super")]
    super_labels: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    min_depth: Option<f64>,
    #[arg(long)]
    element: Option<Element>,
    #[command(flatten)]
    weights: WeightOverrides,
}

fn write_text(path: &Path, text: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, text).map_err(|e| SrgError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| SrgError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn phantom(cmd: PhantomCommand) -> Result<()> {
    match cmd {
        PhantomCommand::Generate {
            spec,
            scalar,
            labels,
            seed,
        } => {
            let mut spec = PhantomSpec::load(spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let (s, l) = generate_phantom(&spec)?;
            save_auto(&s, scalar)?;
            save_auto(&l, labels)
        }
        PhantomCommand::Perturb {
            spec,
            max_shift,
            seed,
            scalar,
            labels,
            spec_out,
        } => {
            let moved = PhantomSpec::load(spec)?.perturbed(max_shift, seed)?;
            let (s, l) = generate_phantom(&moved)?;
            save_auto(&s, scalar)?;
            save_auto(&l, labels)?;
            match spec_out {
                Some(p) => moved.save(p),
                None => Ok(()),
            }
        }
    }
}

fn superseg(args: SupersegArgs) -> Result<()> {
    let vol = load_scalar(&args.input)?;
    let result = supersegment(&vol, args.element, args.min_depth)?;
    save_auto(&result.labels, &args.out)?;
    println!("n_super={}", result.n_super);
    Ok(())
}

fn build_model(args: BuildModelArgs) -> Result<()> {
    if args.scalar.len() != args.labels.len() {
        return Err(SrgError::Config(format!(
            "{} --scalar volumes but {} --labels volumes",
            args.scalar.len(),
            args.labels.len()
        )));
    }
    let mut label_map = None;
    let mut srgs = Vec::with_capacity(args.scalar.len());
    for (s, l) in args.scalar.iter().zip(&args.labels) {
        let scalar = load_scalar(s)?;
        let labels = load_labels(l)?;
        let map = label_map.get_or_insert_with(|| {
            if args.no_background {
                labels.distinct_labels()
            } else {
                labels.distinct_labels_with_background()
            }
        });
        srgs.push(build_srg(&scalar, &labels, map)?);
    }
    let model = Model::fit(&srgs)?;
    write_model(&args.out, &model)?;
    println!("n={} samples={}", model.n(), srgs.len());
    Ok(())
}

fn match_cmd(args: MatchArgs) -> Result<()> {
    let weights = args.weights.resolve()?;
    let model = read_model(&args.model)?;
    let scalar = load_scalar(&args.scalar)?;
    let super_labels = load_labels(&args.super_labels)?;
    let outcome = if args.assignment.is_some() || args.exhaustive {
        let table = RegionTable::from_volumes(&super_labels, &scalar)?;
        let assignment = match &args.assignment {
            Some(p) => parse_assignment(&read_text(p)?, table.n_regions(), model.n())?,
            None => exhaustive_best(&table, &model, &weights, args.cap)?.0,
        };
        let dist = DistanceSpec::from_stats(&model.stats);
        let solution = evaluate_table(&assignment, &table, &model, &dist, &weights)?;
        let segmentation = table.paint(&super_labels, &assignment, model.labels())?;
        MatchOutcome {
            table,
            solution,
            segmentation,
        }
    } else {
        match_super(&model, &scalar, &super_labels, &weights)?
    };
    save_volume(
        &outcome.segmentation,
        &args.out,
        VolumeFormat::from_path(&args.out)?,
    )?;
    if let Some(p) = &args.report {
        write_text(p, format_match_report(&outcome.solution, &weights))?;
    }
    if let Some(p) = &args.assignment_out {
        write_text(p, format_assignment(&outcome.solution.assignment))?;
    }
    if let Some(p) = &args.obs {
        write_text(p, format_graph(&outcome.solution.observation))?;
    }
    println!("cost={}", outcome.solution.report.total);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let base = args.weights.resolve()?;
    let profiles = match &args.profiles {
        Some(p) => parse_profiles(&read_text(p)?, &base)?,
        None => table1_profiles(&base),
    };
    let model = read_model(&args.model)?;
    let scalar = load_scalar(&args.scalar)?;
    let super_labels = load_labels(&args.super_labels)?;
    let table = RegionTable::from_volumes(&super_labels, &scalar)?;
    let result = sweep_weights(&profiles, &table, &model)?;
    let text = if args.json {
        serde_json::to_string_pretty(&result).map_err(|e| SrgError::Config(e.to_string()))? + "\n"
    } else {
        result.to_tsv()
    };
    emit(args.out.as_deref(), &text)
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

fn eval(args: EvalArgs) -> Result<()> {
    let pred = load_labels(&args.pred)?;
    let truth = load_labels(&args.truth)?;
    let report = evaluate_segmentation(&pred, &truth)?;
    let text = if args.json {
        serde_json::to_string_pretty(&report).map_err(|e| SrgError::Config(e.to_string()))? + "\n"
    } else {
        report.to_string()
    };
    emit(args.out.as_deref(), &text)?;
    if args.out.is_some() {
        println!("macro_dice={}", report.macro_dice);
    }
    Ok(())
}

fn render(args: RenderArgs) -> Result<()> {
    let scalar = load_scalar(&args.scalar)?;
    let labels = load_labels(&args.labels)?;
    let index = args.index.unwrap_or(scalar.dims()[args.axis.dim()] / 2);
    render_overlay(
        &scalar,
        &labels,
        args.axis,
        index,
        &Palette::default(),
        &args.out,
    )
}

fn pipeline(args: PipelineArgs) -> Result<()> {
    let missing = |name: &str| SrgError::Config(format!("--{name} is required without --config"));
    let mut cfg = match &args.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig {
            model: args.model.clone().ok_or_else(|| missing("model"))?,
            scalar: args.scalar.clone().ok_or_else(|| missing("scalar"))?,
            super_labels: None,
            truth: None,
            output: args.output.clone().ok_or_else(|| missing("output"))?,
            seed: 0,
            weights: CostWeights::default(),
            superseg: SupersegParams::default(),
        },
    };
    if let Some(v) = args.model {
        cfg.model = v;
    }
    if let Some(v) = args.scalar {
        cfg.scalar = v;
    }
    if let Some(v) = args.super_labels {
        cfg.super_labels = Some(v);
    }
    if let Some(v) = args.truth {
        cfg.truth = Some(v);
    }
    if let Some(v) = args.output {
        cfg.output = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.min_depth {
        cfg.superseg.min_depth = v;
    }
    if let Some(v) = args.element {
        cfg.superseg.element = v;
    }
    cfg.weights = args.weights.apply(cfg.weights)?;
    let summary = run_pipeline(&cfg)?;
    print!("n_super={} cost={}", summary.n_super, summary.cost);
    if let Some(d) = summary.macro_dice {
        print!(" macro_dice={d}");
    }
    println!();
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Phantom(cmd) => phantom(cmd),
        Command::Superseg(a) => superseg(a),
        Command::BuildModel(a) => build_model(a),
        Command::Match(a) => match_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Eval(a) => eval(a),
        Command::Render(a) => render(a),
        Command::Pipeline(a) => pipeline(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
