use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use delineate::bench::{check_shape, run_experiment_with, ExperimentConfig};
use delineate::geo_io::{write_geojson_polygons, write_geojson_rings, write_timing_csv, write_wkt};
use delineate::mask::{write_pbm_ascii, write_pbm_binary};
use delineate::{
    assemble_polygons, detect, form_rings_with, gen_bernoulli, parse_mask, parse_world_file,
    AffineTransform, MaskFormat, PolygonSet, RingOptions,
};

#[derive(Parser)]
#[command(name = "delineate", version, about = "Exact vectorization of binary raster masks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a mask into polygons or rings.
    Delineate(DelineateArgs),
    /// Write a random Bernoulli mask as PBM.
    Gen(GenArgs),
    /// Time the pipeline over random masks and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Geojson,
    Wkt,
    RingsGeojson,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    PbmAscii,
    PbmBinary,
    AsciiGrid,
}

#[derive(clap::Args)]
struct DelineateArgs {
    /// Mask file (PBM P1/P4 or ASCII grid).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    input_format: InputFormat,
    /// Six-line world file; identity transform when omitted.
    #[arg(long)]
    world: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Geojson)]
    format: OutputFormat,
    /// Group holes with their outer rings (default).
    #[arg(long, overrides_with = "no_assemble")]
    assemble: bool,
    /// Write each ring as its own polygon.
    #[arg(long, overrides_with = "assemble")]
    no_assemble: bool,
    #[arg(long)]
    collapse_collinear: bool,
    /// CRS name attached to GeoJSON output.
    #[arg(long)]
    crs: Option<String>,
    /// Output path; `-` or omitted for stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long)]
    width: u32,
    #[arg(long)]
    height: u32,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write plain (P1) instead of raw (P4) PBM.
    #[arg(long)]
    ascii: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Comma-separated raster edge lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [250u32, 500, 1000],
          value_parser = clap::value_parser!(u32).range(1..))]
    sizes: Vec<u32>,
    #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(2..))]
    p_steps: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the 1000²/2000²/4000² grid with 100 trials.
    #[arg(long, conflicts_with_all = ["sizes", "trials"])]
    full: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Fail when the timings are not bell-shaped or do not scale linearly.
    #[arg(long)]
    check_shape: bool,
}

/// Exit status 2: the rings could not be grouped into polygons.
#[derive(Debug)]
struct TopologyFailure(String);

impl std::fmt::Display for TopologyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for TopologyFailure {}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_delineate(args: DelineateArgs) -> anyhow::Result<()> {
    let bytes = fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let format = match args.input_format {
        InputFormat::Auto => MaskFormat::sniff(&bytes),
        InputFormat::PbmAscii => MaskFormat::PbmAscii,
        InputFormat::PbmBinary => MaskFormat::PbmBinary,
        InputFormat::AsciiGrid => MaskFormat::AsciiGrid,
    };
    let raster = parse_mask(&bytes, format)
        .with_context(|| format!("parsing {} as {format}", args.input.display()))?;
    let transform = match &args.world {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_world_file(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => AffineTransform::IDENTITY,
    };

    let mut result = detect(&raster);
    let options = RingOptions { collapse_collinear: args.collapse_collinear };
    let rings = form_rings_with(&mut result, &transform, options);
    let crs = args.crs.as_deref();

    let text = if let OutputFormat::RingsGeojson = args.format {
        write_geojson_rings(&rings.world, crs)?
    } else {
        let grid = if args.no_assemble {
            PolygonSet::from_rings(&rings.grid)
        } else {
            assemble_polygons(&rings.grid).map_err(|e| TopologyFailure(e.to_string()))?
        };
        let world = grid.to_world(&transform);
        match args.format {
            OutputFormat::Wkt => write_wkt(&world)?,
            _ => write_geojson_polygons(&world, crs)?,
        }
    };
    eprintln!(
        "{}x{} mask: {} vertices, {} rings",
        raster.width(),
        raster.height(),
        result.vertex_count(),
        rings.grid.len()
    );
    write_output(args.output.as_deref(), format!("{text}\n").as_bytes())
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let raster = gen_bernoulli(args.width, args.height, args.p, args.seed)?;
    let bytes = if args.ascii { write_pbm_ascii(&raster) } else { write_pbm_binary(&raster) };
    write_output(args.output.as_deref(), &bytes)
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let config = if args.full {
        ExperimentConfig { seed: args.seed, p_steps: args.p_steps as usize, ..ExperimentConfig::full() }
    } else {
        ExperimentConfig {
            sizes: args.sizes,
            p_steps: args.p_steps as usize,
            trials: args.trials as usize,
            seed: args.seed,
        }
    };
    let records = run_experiment_with(&config, |r| {
        eprintln!(
            "size {:>5}  p {:.2}  mean {:.6}s  sd {:.6}s  vertices {:.0}",
            r.size, r.p, r.mean_seconds, r.stddev_seconds, r.mean_vertices
        );
    })?;
    write_output(args.output.as_deref(), write_timing_csv(&records)?.as_bytes())?;
    if args.check_shape {
        match check_shape(&records) {
            Ok(report) => {
                for s in &report.series {
                    eprintln!("size {}: peak at p={} ({:.6}s)", s.size, s.peak_p, s.peak_mean);
                }
                for c in &report.scaling {
                    eprintln!(
                        "{} vs {}: time x{:.2}, pixels x{:.2}",
                        c.size, c.base_size, c.time_ratio, c.pixel_ratio
                    );
                }
            }
            Err(violation) => bail!("shape check failed: {violation}"),
        }
    }
    Ok(())
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
    let result = match cli.command {
        Command::Delineate(args) => cmd_delineate(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<TopologyFailure>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
