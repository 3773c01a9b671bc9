//! `excircle`: find and check integer triangles whose circumradius is a
//! given rational multiple of one of their exradii.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 nothing found,
//! 4 internal consistency failure.

mod cache;

/// `println!` that exits quietly when stdout is closed early, as in
/// `excircle table | head`.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("failed writing to stdout: {e}");
        }
    }};
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use excircle::arith::{fmt_rational, int, parse_rational, BigRational};
use excircle::curve::{order12_excluded, Curve, TorsionGroup};
use excircle::families::{family, fix_into_region, one_triangle, sequence_step, RegionTarget, Variant};
use excircle::poncelet::{compose, render_svg};
use excircle::record::{TriangleRecord, CSV_HEADER};
use excircle::search::{find_triangles_with, oracle_enumerate, oracle_filter, Exec, SearchConfig};
use excircle::table::{builtin_rows, TableRow};
use excircle::triangle::{point_from_triangle, region_ok, synthesize, verify, Role, Triangle};
use num_traits::ToPrimitive;

use cache::{Cache, Entry, Source};

#[derive(Parser)]
#[command(name = "excircle", version, about = "Integer triangles with R/r = N for an excircle radius r")]
struct Cli {
    /// Cache file (default: $EXCIRCLE_CACHE, else ~/.cache/excircle/cache.json).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Do not read or write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triangles for N, from the cache and a height-bounded search.
    Find {
        #[arg(long, value_parser = rational)]
        n: BigRational,
        #[arg(long, default_value_t = 1000)]
        height: u64,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[command(flatten)]
        format: FormatArgs,
        /// Report search progress on stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Exact circumradius to exradius and inradius ratios of a triangle.
    Verify {
        /// Sides as f,g,h; h is the side the third excircle touches.
        #[arg(long, value_parser = sides)]
        sides: Triangle,
    },
    /// Re-verify the built-in table or a CSV of N,f,g,h rows.
    Table {
        #[arg(long)]
        rows: Option<PathBuf>,
    },
    /// Torsion subgroup of E_N.
    Torsion {
        #[arg(long, value_parser = rational)]
        n: BigRational,
    },
    /// Triangles of the N = m^2 + 1 and N = m^2 - 1 families.
    Family {
        #[arg(long, value_parser = rational)]
        m: BigRational,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// The doubling sequence R -> -(2R + T3-) from a seed with u > 1.
    Sequence {
        #[arg(long, value_parser = rational)]
        n: BigRational,
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Height bound for finding a seed when the cache has none.
        #[arg(long, default_value_t = 1000)]
        height: u64,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// SVG of several triangles sharing circumcircle and excircle.
    Poncelet {
        #[arg(long, value_parser = rational)]
        n: BigRational,
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also dump the scene coordinates as JSON.
        #[arg(long)]
        scene_json: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        height: u64,
    },
    /// Brute-force enumeration of integer triangles by perimeter.
    Oracle {
        #[arg(long)]
        perimeter: u64,
        #[arg(long, value_parser = rational)]
        n: Option<BigRational>,
    },
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct FormatArgs {
    /// One JSON record per line.
    #[arg(long)]
    json: bool,
    /// CSV with an N,f,g,h header.
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plus,
    Minus,
}

enum Failure {
    Usage(String),
    NotFound(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NotFound(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::NotFound(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<excircle::Error> for Failure {
    fn from(e: excircle::Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn rational(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn sides(s: &str) -> Result<Triangle, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [f, g, h] = parts.as_slice() else {
        return Err(format!("expected three comma-separated sides, got {s:?}"));
    };
    Ok(Triangle::new(rational(f)?, rational(g)?, rational(h)?))
}

fn default_cache_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("EXCIRCLE_CACHE") {
        return Some(PathBuf::from(p));
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("excircle").join("cache.json"))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

impl FormatArgs {
    fn format(self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            default
        }
    }
}

fn print_records(records: &[TriangleRecord], format: Format) {
    match format {
        Format::Json => {
            for r in records {
                out!("{}", r.to_json());
            }
        }
        Format::Csv => {
            out!("{CSV_HEADER}");
            for r in records {
                out!("{}", r.to_csv());
            }
        }
        Format::Text => {
            for r in records {
                let mut line = format!("N={}  {}, {}, {}", r.n, r.f, r.g, r.h);
                if let (Some(u), Some(v)) = (&r.u, &r.v) {
                    line.push_str(&format!("  point ({u}, {v})"));
                }
                out!("{line}");
            }
        }
    }
}

fn curve(n: &BigRational) -> Result<Curve, Failure> {
    Ok(Curve::new(n.clone())?)
}

fn sort_entries(entries: &mut [Entry]) {
    entries.sort_by(|a, b| {
        a.triangle
            .perimeter()
            .cmp(&b.triangle.perimeter())
            .then_with(|| a.triangle.mirror_key().cmp(&b.triangle.mirror_key()))
    });
}

/// Cached entries for `n`, topped up by a search at `height` when fewer
/// than `want` are known.
fn gather(cache: &mut Cache, n: &BigRational, want: usize, height: u64, progress: bool) -> Result<Vec<Entry>, Failure> {
    curve(n)?;
    if cache.get(n).len() < want {
        let cfg = SearchConfig::new(height);
        let report = |k: u64| {
            if progress {
                eprintln!("searched {k}/{height} denominators");
            }
        };
        for t in find_triangles_with(n, &cfg, Exec::default(), &report)? {
            let (_, point) = point_from_triangle(&t, Role::H)?;
            let entry = Entry {
                point,
                triangle: t,
                source: Source::Search,
            };
            cache.insert(n, entry).map_err(Failure::Internal)?;
        }
    }
    let mut entries = cache.get(n).to_vec();
    sort_entries(&mut entries);
    Ok(entries)
}

/// Extends `entries` to `want` triangles using multiples `kP` of the
/// first point.
fn extend_by_multiples(cache: &mut Cache, n: &BigRational, mut entries: Vec<Entry>, want: usize) -> Result<Vec<Entry>, Failure> {
    let c = curve(n)?;
    let Some(base) = entries.first().map(|e| e.point.clone()) else {
        return Ok(entries);
    };
    let mut k = 2;
    while entries.len() < want && k <= 32 {
        let (point, triangle) = one_triangle(&c, &c.mul(k, &base)?)?;
        let key = triangle.mirror_key();
        if entries.iter().all(|e| e.triangle.mirror_key() != key) {
            let entry = Entry {
                point,
                triangle,
                source: Source::Sequence,
            };
            cache.insert(n, entry.clone()).map_err(Failure::Internal)?;
            entries.push(entry);
        }
        k += 1;
    }
    Ok(entries)
}

fn cmd_find(cache: &mut Cache, n: &BigRational, height: u64, count: usize, format: Format, progress: bool) -> CmdResult {
    let c = curve(n)?;
    let entries = gather(cache, n, count, height, progress)?;
    if entries.is_empty() {
        return Err(Failure::NotFound(format!("no triangle for N={n} at height {height}")));
    }
    let records: Vec<TriangleRecord> = entries
        .iter()
        .take(count)
        .map(|e| TriangleRecord::new(n, &e.triangle, Some((&c, &e.point))))
        .collect();
    print_records(&records, format);
    Ok(())
}

fn cmd_verify(t: &Triangle) -> CmdResult {
    let r = verify(t)?;
    let mark = |q: &BigRational| if q.is_integer() { "  [integer]" } else { "" };
    out!("triangle {t}");
    out!("excircle at f: R/r = {}{}", r.excircle_f, mark(&r.excircle_f));
    out!("excircle at g: R/r = {}{}", r.excircle_g, mark(&r.excircle_g));
    out!("excircle at h: R/r = {}{}", r.excircle_h, mark(&r.excircle_h));
    out!("incircle:      R/r = {}{}", r.incircle, mark(&r.incircle));
    Ok(())
}

fn read_rows(path: &PathBuf) -> Result<Vec<TableRow>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with('N')) {
            continue;
        }
        let bad = |why: String| Failure::Usage(format!("{}:{}: {why}", path.display(), i + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [n, f, g, h] = fields.as_slice() else {
            return Err(bad(format!("expected N,f,g,h, got {line:?}")));
        };
        let [n, f, g, h] = [n, f, g, h].map(|s| rational(s));
        rows.push(TableRow {
            n: n.map_err(bad)?,
            triangle: Triangle::new(f.map_err(bad)?, g.map_err(bad)?, h.map_err(bad)?),
        });
    }
    Ok(rows)
}

fn cmd_table(rows: Option<PathBuf>) -> CmdResult {
    let rows = match rows {
        Some(path) => read_rows(&path)?,
        None => builtin_rows(),
    };
    let mut failures = 0;
    out!("N,f,g,h,status");
    for row in &rows {
        let status = match verify(&row.triangle) {
            Ok(r) if r.excircle_h == row.n => "ok",
            Ok(_) => "mismatch",
            Err(_) => "invalid",
        };
        if status != "ok" {
            failures += 1;
        }
        let t = &row.triangle;
        out!("{},{},{},{},{status}", row.n, t.f, t.g, t.h);
    }
    if failures > 0 {
        return Err(Failure::Internal(format!("{failures} of {} rows failed to verify", rows.len())));
    }
    Ok(())
}

fn cmd_torsion(n: &BigRational) -> CmdResult {
    let c = curve(n)?;
    let report = c.torsion_points();
    match (&report.group, &report.m_sqrt) {
        (TorsionGroup::Z2xZ6, Some(m)) => out!("{}, M={m}", report.group),
        _ => out!("{}", report.group),
    }
    for (p, order) in &report.points {
        if !c.contains(p) || c.small_order(p) != Some(*order) {
            return Err(Failure::Internal(format!("torsion point {p} failed its check")));
        }
        out!("order {order}: {p}");
    }
    let chk = order12_excluded(n)?;
    out!(
        "order 12 excluded: {} (delta={}, L={})",
        if chk.excluded { "yes" } else { "no" },
        chk.delta,
        chk.l
    );
    Ok(())
}

fn cmd_family(cache: &mut Cache, m: &BigRational, variant: VariantArg, format: Format) -> CmdResult {
    let variant = match variant {
        VariantArg::Plus => Variant::Plus,
        VariantArg::Minus => Variant::Minus,
    };
    let res = family(m, variant)?;
    let c = curve(&res.n)?;
    let entry = Entry {
        point: res.admissible_point.clone(),
        triangle: res.triangle.clone(),
        source: Source::Family,
    };
    cache.insert(&res.n, entry).map_err(Failure::Internal)?;
    match format {
        Format::Json => out!("{}", serde_json::to_string(&res).expect("family result serialises")),
        Format::Csv => print_records(&[TriangleRecord::new(&res.n, &res.triangle, Some((&c, &res.admissible_point)))], format),
        Format::Text => {
            out!("N={}  {}", res.n, res.triangle);
            out!("base point {}", res.base_point);
            out!("admissible point {}", res.admissible_point);
        }
    }
    Ok(())
}

fn cmd_sequence(cache: &mut Cache, n: &BigRational, count: usize, height: u64, format: Format) -> CmdResult {
    if count == 0 {
        return Err(Failure::Usage("count must be at least 1".into()));
    }
    let c = curve(n)?;
    let entries = gather(cache, n, 1, height, false)?;
    let Some(first) = entries.first() else {
        return Err(Failure::NotFound(format!("no seed point for N={n} at height {height}")));
    };
    let mut r = fix_into_region(&c, &first.point, RegionTarget::BeyondOne)?;
    let mut records = Vec::with_capacity(count);
    let mut failure = None;
    for k in 0..count {
        if k > 0 {
            r = sequence_step(&c, &r);
        }
        let beyond_one = r.u().is_some_and(|u| *u > int(1));
        if !(region_ok(&c, &r) && beyond_one) {
            let u = r.u().and_then(|u| u.to_f64()).unwrap_or(f64::NAN);
            failure = Some(Failure::Internal(format!(
                "iterate R_{k} has u ~ {u:.6}, outside u > 1; stopping"
            )));
            break;
        }
        let (t, _) = synthesize(&c, &r)?;
        // Iterates with thousands of digits are not worth caching.
        if k < 4 {
            let entry = Entry {
                point: r.clone(),
                triangle: t.clone(),
                source: Source::Sequence,
            };
            cache.insert(n, entry).map_err(Failure::Internal)?;
        }
        records.push(TriangleRecord::new(n, &t, Some((&c, &r))));
    }
    print_records(&records, format);
    failure.map_or(Ok(()), Err)
}

fn cmd_poncelet(cache: &mut Cache, n: &BigRational, count: usize, out: &PathBuf, scene_json: Option<&PathBuf>, height: u64) -> CmdResult {
    if count == 0 {
        return Err(Failure::Usage("count must be at least 1".into()));
    }
    let entries = gather(cache, n, count, height, false)?;
    if entries.is_empty() {
        return Err(Failure::NotFound(format!("no triangle for N={n} at height {height}")));
    }
    let entries = extend_by_multiples(cache, n, entries, count)?;
    let triangles: Vec<Triangle> = entries.iter().take(count).map(|e| e.triangle.clone()).collect();
    let scene = compose(&triangles, n)?;
    let inc = scene.incidence();
    if !inc.passes() {
        return Err(Failure::Internal(format!("incidence check failed: {inc:?}")));
    }
    let write = |path: &PathBuf, body: String| {
        fs::write(path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
    };
    write(out, render_svg(&scene))?;
    if let Some(path) = scene_json {
        write(path, scene.to_json())?;
    }
    for t in &triangles {
        out!("N={n}  {t}");
    }
    out!(
        "R={:.6} r={:.6} d={:.6}; wrote {}",
        scene.big_radius,
        scene.small_radius,
        scene.center_distance,
        out.display()
    );
    Ok(())
}

fn cmd_oracle(perimeter: u64, n: Option<&BigRational>) -> CmdResult {
    let records = oracle_enumerate(perimeter)?;
    match n {
        Some(n) => {
            curve(n)?;
            let found = oracle_filter(&records, n);
            if found.is_empty() {
                return Err(Failure::NotFound(format!("no triangle with perimeter <= {perimeter} has R/r = {n}")));
            }
            let records: Vec<TriangleRecord> = found.iter().map(|t| TriangleRecord::new(n, t, None)).collect();
            print_records(&records, Format::Csv);
        }
        None => {
            out!("f,g,h,perimeter,excircle_f,excircle_g,excircle_h,incircle");
            for r in &records {
                let (t, q) = (&r.triangle, &r.ratios);
                out!(
                    "{},{},{},{},{},{},{},{}",
                    t.f,
                    t.g,
                    t.h,
                    r.perimeter,
                    fmt_rational(&q.excircle_f),
                    fmt_rational(&q.excircle_g),
                    fmt_rational(&q.excircle_h),
                    fmt_rational(&q.incircle)
                );
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let uses_cache = matches!(
        cli.command,
        Command::Find { .. } | Command::Family { .. } | Command::Sequence { .. } | Command::Poncelet { .. }
    );
    let mut cache = match (cli.no_cache, cli.cache.or_else(default_cache_path)) {
        (false, Some(path)) if uses_cache => Cache::load(&path),
        _ => Cache::in_memory(),
    };
    let result = match &cli.command {
        Command::Find {
            n,
            height,
            count,
            format,
            progress,
        } => cmd_find(&mut cache, n, *height, *count, format.format(Format::Text), *progress),
        Command::Verify { sides } => cmd_verify(sides),
        Command::Table { rows } => cmd_table(rows.clone()),
        Command::Torsion { n } => cmd_torsion(n),
        Command::Family { m, variant, format } => cmd_family(&mut cache, m, *variant, format.format(Format::Text)),
        Command::Sequence {
            n,
            count,
            height,
            format,
        } => cmd_sequence(&mut cache, n, *count, *height, format.format(Format::Json)),
        Command::Poncelet {
            n,
            count,
            out,
            scene_json,
            height,
        } => cmd_poncelet(&mut cache, n, *count, out, scene_json.as_ref(), *height),
        Command::Oracle { perimeter, n } => cmd_oracle(*perimeter, n.as_ref()),
    };
    if let Err(e) = cache.save() {
        eprintln!("warning: could not write cache: {e}");
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
