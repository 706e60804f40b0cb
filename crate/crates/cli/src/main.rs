use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use tiling_semigroup::filters::{build_plaque_universe, build_universe, psi};
use tiling_semigroup::report::Report;
use tiling_semigroup::semigroup::TilingSemigroup;
use tiling_semigroup::substitution::{builtin_names, DEFAULT_CELL_BUDGET};
use tiling_semigroup::suites::{self, filters, groupoid, semigroup};
use tiling_semigroup::svg::{render_svg, Palette};
use tiling_semigroup::{window_distance, Patch, SubstitutionSystem, Window};

/// Tiling inverse semigroups: windows, atlases, renders and verification
/// suites with reproducible seeds.
#[derive(Debug, Parser)]
#[command(name = "tsg", version)]
struct Cli {
    /// Builtin system name or path to a TOML substitution config.
    #[arg(long, global = true, default_value = "chair")]
    system: String,

    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest supertile, in cells, the generator may build.
    #[arg(long, global = true, env = "TSG_CELL_BUDGET", default_value_t = DEFAULT_CELL_BUDGET)]
    cell_budget: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Window of the fixed point of this radius.
    #[arg(long, conflicts_with = "depth")]
    radius: Option<u32>,

    /// Supertile of this depth.
    #[arg(long)]
    depth: Option<u32>,

    /// Label of the supertile (defaults to the first label).
    #[arg(long, requires = "depth")]
    label: Option<String>,

    /// Patch file in `label x y` format.
    #[arg(long, conflicts_with_all = ["radius", "depth"])]
    patch: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a window or supertile as a patch file.
    Gen(Source),
    /// Render a window, supertile or patch file as SVG.
    Render(Source),
    /// List every `B_r` pattern of the tiling.
    Atlas {
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Inverse-semigroup axioms and the nonzero criterion.
    SemigroupCheck {
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Random triples and pairs for the sampled checks.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Filters of windows, maximality, reconstruction, `Ψ` and the square
    /// relating the two actions.
    FiltersCheck {
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Below four tiles the truncated universe admits filters that
        /// straddle patches it cannot hold, and reconstruction fails.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Seeded windows to test.
        #[arg(long, default_value_t = 20)]
        windows: usize,
        /// Also write the character of every window to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Germ equivalence by both criteria and the properties of `α`.
    GroupoidCheck {
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Windows, one per class of `B_{r+1}` content, up to this many.
        #[arg(long, default_value_t = 40)]
        windows: usize,
    },
    /// Distance between two windows given as patch files.
    Metric {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        radius: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("tsg: {e}");
            ExitCode::from(2)
        }
    }
}

type Failure = Box<dyn std::error::Error>;

fn load_system(cli: &Cli) -> Result<SubstitutionSystem, Failure> {
    let system = if builtin_names().any(|n| n == cli.system) {
        SubstitutionSystem::builtin(&cli.system)?
    } else {
        let text = fs::read_to_string(&cli.system).map_err(|e| format!("cannot read `{}`: {e}", cli.system))?;
        SubstitutionSystem::load(&text)?
    };
    Ok(system.with_cell_budget(cli.cell_budget))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write `{}`: {e}", p.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn source_patch(system: &SubstitutionSystem, src: &Source) -> Result<(Patch, String), Failure> {
    if let Some(path) = &src.patch {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read `{}`: {e}", path.display()))?;
        return Ok((Patch::from_text(&text, system.alphabet())?, format!("file={}", path.display())));
    }
    if let Some(depth) = src.depth {
        let label = match &src.label {
            Some(name) => system.alphabet().lookup(name).ok_or_else(|| format!("unknown label `{name}`"))?,
            None => system.labels().next().expect("non-empty alphabet"),
        };
        let patch = system.supertile(label, depth)?;
        return Ok((patch, format!("supertile={} depth={depth}", system.alphabet().name(label))));
    }
    let radius = src.radius.ok_or("one of --radius, --depth or --patch is required")?;
    Ok((system.fixed_point_window(radius)?.patch(), format!("window radius={radius}")))
}

fn header(report: &mut Report, cli: &Cli, system: &SubstitutionSystem) {
    report.meta("system", system.name());
    report.meta("seed", cli.seed);
}

fn finish(cli: &Cli, report: &Report) -> Result<bool, Failure> {
    emit(cli.out.as_deref(), &report.render())?;
    Ok(report.passed())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let system = load_system(cli)?;
    match &cli.command {
        Command::Gen(src) => {
            let (patch, what) = source_patch(&system, src)?;
            let text = format!("# system={} {what}\n{}", system.name(), patch.to_text(system.alphabet()));
            emit(cli.out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Render(src) => {
            let (patch, _) = source_patch(&system, src)?;
            let svg = render_svg(&patch, &Palette::default_for(system.alphabet()), system.alphabet());
            emit(cli.out.as_deref(), &svg)?;
            Ok(true)
        }
        Command::Atlas { r } => {
            let atlas = system.atlas(*r)?;
            let mut text = format!("# system={} r={r} patterns={}\n", system.name(), atlas.len());
            for (k, p) in atlas.iter().enumerate() {
                text.push_str(&format!("# pattern {k}\n{}", p.to_text(system.alphabet())));
            }
            emit(cli.out.as_deref(), &text)?;
            Ok(true)
        }
        Command::SemigroupCheck { r, n, samples } => {
            let sg = TilingSemigroup::new(system);
            let mut report = Report::new("semigroup-check");
            header(&mut report, cli, sg.system());
            let elements = sg.enumerate_elements(*r, *n)?;
            let tag = format!("r={r} n={n}");
            report.meta("elements", elements.len());
            semigroup::regularity(&sg, &elements, &tag, &mut report);
            semigroup::commuting_idempotents(&sg, &elements, &tag, &mut report);
            semigroup::associativity(&sg, &elements, &tag, &mut report);
            semigroup::random_associativity(&sg, &elements, *samples, cli.seed, &tag, &mut report);
            let ball = 2 * semigroup::patch_reach(&elements);
            let windows = sg.system().realized_windows(ball, ball.max(16))?;
            semigroup::nonzero_criterion(&sg, &elements, &windows, *samples, cli.seed, &tag, &mut report);
            semigroup::action_homomorphism(&sg, &elements, &windows, *samples, cli.seed, &tag, &mut report)?;
            finish(cli, &report)
        }
        Command::FiltersCheck { r, n, windows, dump } => {
            let sg = TilingSemigroup::new(system);
            let mut report = Report::new("filters-check");
            header(&mut report, cli, sg.system());
            let radius = 16.max(2 * r);
            let ws = suites::seeded_windows(sg.system(), *windows, radius, 48, cli.seed)?;
            let u = build_universe(&sg, *r, *n)?;
            let tag = format!("R={radius}");
            filters::xi_is_filter(&sg, &ws, &u, &tag, &mut report)?;
            let side = (2 * *r as usize + 1).pow(2);
            let plaques = build_plaque_universe(&sg, *r, side)?;
            filters::xi_is_ultrafilter(&sg, &ws, &plaques, &tag, &mut report)?;
            filters::psi_injectivity(&sg.system().realized_windows(*r, *r)?, &plaques, "atlas", &mut report)?;
            filters::reconstruction(&sg, &u, 10_000_000, &format!("r={r} n={n}"), &mut report)?;
            let elements = sg.enumerate_elements(*r, *n)?;
            filters::commuting_diagram(&sg, &elements, &ws, &u, 0.0, &tag, &mut report)?;
            if let Some(path) = dump {
                let mut text = String::new();
                for (k, w) in ws.iter().enumerate() {
                    text.push_str(&format!("# window {k}\n{}", psi(w, &u)?.dump(&u, sg.alphabet())));
                }
                fs::write(path, text).map_err(|e| format!("cannot write `{}`: {e}", path.display()))?;
            }
            finish(cli, &report)
        }
        Command::GroupoidCheck { r, n, windows } => {
            let sg = TilingSemigroup::from_arc(Arc::new(system));
            let mut report = Report::new("groupoid-check");
            header(&mut report, cli, sg.system());
            let mut ws = sg.system().realized_windows(r + 1, 16.max(4 * r))?;
            ws.truncate(*windows);
            let pop = groupoid::Population { radius: *r, max_tiles: *n, reach: *r };
            let u = build_plaque_universe(&sg, *r, (2 * *r as usize + 1).pow(2))?;
            let tag = format!("R={}", ws.first().map_or(0, Window::radius));
            groupoid::germ_equivalence(&sg, &ws, &u, pop, &tag, &mut report)?;
            groupoid::alpha_isomorphism(&sg, &ws, pop, &tag, &mut report)?;
            finish(cli, &report)
        }
        Command::Metric { a, b, radius } => {
            let read = |p: &Path| -> Result<Window, Failure> {
                let text = fs::read_to_string(p).map_err(|e| format!("cannot read `{}`: {e}", p.display()))?;
                Ok(Window::from_patch(&Patch::from_text(&text, system.alphabet())?, *radius)?)
            };
            let (wa, wb) = (read(a)?, read(b)?);
            let d = window_distance(&wa, &wb);
            let agree = wa.agreement_radius(&wb).map_or("none".to_string(), |r| r.to_string());
            emit(cli.out.as_deref(), &format!("distance {d}\nagreement-radius {agree}\n"))?;
            Ok(true)
        }
    }
}
