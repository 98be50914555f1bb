//! Dispatch of parsed commands to library operations.

use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use zetalab::arith::CoefficientFamily;
use zetalab::characters::{additive_to_multiplicative_residual, build_characters};
use zetalab::contour::{gonek_check, perron_check, perron_ladder, rectangle_identity_check, RectangleConfig, Twist};
use zetalab::correlation::{
    theorem21_report, theorem21_report_with_catalog, theorem21_trend, zero_sum, ReportOptions, ShiftParams, SumReport,
};
use zetalab::lemmas::{
    appendix_scan, check_3_14, check_3_15, check_3_16, check_3_17, check_3_18_19, AppendixMode, LemmaVerdict,
    ResonanceVariant, YRule,
};
use zetalab::zeros::{counting_formula, find_zeros, import_zeros, load_cache, save_cache, ZeroCatalog};
use zetalab::zeta::MAX_HEIGHT;

use crate::config::{parse_list, Config, Scope};
use crate::output::{render_text, to_json, write_file};
use crate::{Cli, CliError, Command, UsageError, ZerosCommand};

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_VAR: &str = "ZETALAB_CACHE_DIR";

/// Default lemma grids.
const X_GRID: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
const X_GRID_3_17: [f64; 3] = [1e3, 1e4, 1e5];
const T_GRID_3_18: [f64; 3] = [1e3, 1e4, 1e5];
const APPENDIX_T_GRID: [f64; 9] = [1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14];

/// Twenty (A, B) ranges up to B = 10⁷.
pub fn default_3_16_pairs() -> Vec<(f64, f64)> {
    let mut pairs = Vec::new();
    for a in [10.0, 100.0, 1e3, 1e4] {
        for b in [1e3, 1e4, 1e5, 1e6, 1e7] {
            if a < b {
                pairs.push((a, b));
            }
        }
    }
    pairs.extend([(2.0, 100.0), (50.0, 5e6), (3.0, 1e7)]);
    pairs
}

/// What a command produced.
struct Report {
    value: Value,
    csv: Option<String>,
    passed: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Zeros(ZerosCommand::Find(_)) => "zeros.find",
        Command::Zeros(ZerosCommand::Import(_)) => "zeros.import",
        Command::Zeros(ZerosCommand::Verify(_)) => "zeros.verify",
        Command::Sum(_) => "sum",
        Command::Theorem21(_) => "theorem21",
        Command::Lemmas(_) => "lemmas",
        Command::Perron(_) => "perron",
        Command::Contour(_) => "contour",
        Command::Gonek(_) => "gonek",
        Command::Appendix(_) => "appendix",
        Command::Chars(_) => "chars",
    }
}

pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let name = command_name(&cli.command);
    let scope = cfg.scope(name);
    let threads = scope.get(cli.threads, "threads", 1usize)?;
    if threads == 0 {
        return Err(UsageError("--threads must be at least 1".into()).into());
    }
    // a pool already built by an earlier call in the same process is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();

    let report = match &cli.command {
        Command::Zeros(ZerosCommand::Find(a)) => zeros_find(&scope, a)?,
        Command::Zeros(ZerosCommand::Import(a)) => zeros_import(&scope, a)?,
        Command::Zeros(ZerosCommand::Verify(a)) => zeros_verify(&scope, a)?,
        Command::Sum(a) => sum(&scope, a)?,
        Command::Theorem21(a) => theorem21(&scope, a)?,
        Command::Lemmas(a) => lemmas(&scope, a)?,
        Command::Perron(a) => perron(&scope, a)?,
        Command::Contour(a) => contour(&scope, a)?,
        Command::Gonek(a) => gonek(&scope, a)?,
        Command::Appendix(a) => appendix(&scope, a)?,
        Command::Chars(a) => chars(&scope, a)?,
    };
    let value = json!({ "command": name, "passed": report.passed, "report": report.value });
    if let Some(out) = scope.opt(cli.out.clone(), "out")? {
        write_file(&out, &to_json(&value))?;
    }
    if let Some(path) = scope.opt(cli.csv.clone(), "csv")? {
        match &report.csv {
            Some(c) => write_file(&path, c)?,
            None => return Err(UsageError(format!("{name} has no CSV schema")).into()),
        }
    }
    if !scope.switch(cli.quiet, "quiet")? {
        print!("{}", render_text(&value));
    }
    Ok(report.passed)
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn default_cache_path(stem: &str) -> Option<PathBuf> {
    cache_dir().map(|d| d.join(format!("{stem}.zcat")))
}

fn save(catalog: &ZeroCatalog, path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| UsageError(format!("cannot create {}: {e}", parent.display())))?;
    }
    Ok(save_cache(catalog, path)?)
}

/// A catalog covering [lo, hi]: the named cache, else a covering file in the
/// cache directory, else a fresh computation.
fn catalog_for(cache: Option<PathBuf>, lo: f64, hi: f64) -> Result<(ZeroCatalog, String), CliError> {
    if let Some(p) = cache {
        let c = load_cache(&p)?;
        if !c.covers(lo, hi) {
            return Err(UsageError(format!("cache {} covers [{}, {}], not [{lo}, {hi}]", p.display(), c.t_min, c.t_max)).into());
        }
        return Ok((c, p.display().to_string()));
    }
    if let Some(dir) = cache_dir() {
        if let Ok(rd) = std::fs::read_dir(&dir) {
            let mut files: Vec<PathBuf> =
                rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "zcat")).collect();
            files.sort();
            for p in files {
                if let Ok(c) = load_cache(&p) {
                    if c.covers(lo, hi) {
                        return Ok((c, p.display().to_string()));
                    }
                }
            }
        }
    }
    Ok((find_zeros(lo.max(10.0), hi.min(MAX_HEIGHT))?, "computed".into()))
}

fn catalog_summary(c: &ZeroCatalog) -> Value {
    let first: Vec<f64> = c.entries().iter().take(20).map(|e| e.ordinate).collect();
    json!({
        "t_min": c.t_min,
        "t_max": c.t_max,
        "count": c.len(),
        "expected": counting_formula(c.t_max) - counting_formula(c.t_min),
        "deviation": c.count_deviation(),
        "first_ordinates": first,
    })
}

fn zeros_find(s: &Scope, a: &crate::FindArgs) -> Result<Report, CliError> {
    let t_min = s.req(a.t_min, "t-min")?;
    let t_max = s.req(a.t_max, "t-max")?;
    let catalog = find_zeros(t_min, t_max)?;
    let path = s.opt(a.cache.clone(), "cache")?.or_else(|| default_cache_path(&format!("zeros_{t_min}_{t_max}")));
    if let Some(p) = &path {
        save(&catalog, p)?;
    }
    let mut v = catalog_summary(&catalog);
    v["cache"] = json!(path.map(|p| p.display().to_string()));
    let passed = catalog.count_deviation().abs() <= 1.0;
    Ok(Report { value: v, csv: None, passed })
}

fn zeros_import(s: &Scope, a: &crate::ImportArgs) -> Result<Report, CliError> {
    let file: PathBuf = s.req(a.file.clone(), "file")?;
    let catalog = import_zeros(&file)?;
    let stem = file.file_stem().map(|x| x.to_string_lossy().into_owned()).unwrap_or_else(|| "imported".into());
    let path = s.opt(a.cache.clone(), "cache")?.or_else(|| default_cache_path(&stem));
    if let Some(p) = &path {
        save(&catalog, p)?;
    }
    let mut v = catalog_summary(&catalog);
    v["cache"] = json!(path.map(|p| p.display().to_string()));
    Ok(Report { value: v, csv: None, passed: true })
}

fn zeros_verify(s: &Scope, a: &crate::VerifyArgs) -> Result<Report, CliError> {
    let path: PathBuf = s.req(a.cache.clone(), "cache")?;
    let tol = s.get(a.tol, "tol", 1e-6)?;
    let catalog = load_cache(&path)?;
    let (reference, label, count) = match s.opt(a.reference.clone(), "reference")? {
        Some(r) => {
            let n = s.get(a.count, "count", 20usize)?;
            (import_zeros(&r)?, r.display().to_string(), n)
        }
        None => {
            let c = find_zeros(catalog.t_min, catalog.t_max)?;
            let n = s.get(a.count, "count", usize::MAX)?;
            (c, "recomputed".to_string(), n)
        }
    };
    let n = count.min(catalog.len()).min(reference.len());
    let (mut worst, mut witness) = (0.0f64, None);
    for (i, (x, y)) in catalog.entries().iter().zip(reference.entries()).take(n).enumerate() {
        let d = (x.ordinate - y.ordinate).abs();
        if d > worst || witness.is_none() {
            worst = worst.max(d);
            witness = Some(i);
        }
    }
    let compared_all = n == count || (count == usize::MAX && catalog.len() == reference.len());
    let passed = worst <= tol && compared_all && catalog.count_deviation().abs() <= 1.0;
    let v = json!({
        "catalog": catalog_summary(&catalog),
        "reference": label,
        "compared": n,
        "max_difference": worst,
        "worst_index": witness,
        "tolerance": tol,
    });
    Ok(Report { value: v, csv: None, passed })
}

fn sum(s: &Scope, a: &crate::SumArgs) -> Result<Report, CliError> {
    let t1 = s.req(a.t1, "t1")?;
    let t2 = s.req(a.t2, "t2")?;
    let x = s.req(a.x, "x")?;
    let shifts = ShiftParams::new(s.req(a.y1, "y1")?, s.req(a.y2, "y2")?, 1.0)?;
    if !zetalab::arith::is_prime(x) {
        return Err(UsageError(format!("x = {x} is not prime")).into());
    }
    let (catalog, source) = catalog_for(s.opt(a.cache.clone(), "cache")?, t1, t2)?;
    let z = zero_sum(&catalog, &shifts, x, t1, t2)?;
    let v = json!({ "t1": t1, "t2": t2, "x": x, "y1": shifts.y1(), "y2": shifts.y2(), "catalog": source, "sum": to_value(&z) });
    Ok(Report { value: v, csv: None, passed: true })
}

fn theorem21(s: &Scope, a: &crate::Theorem21Args) -> Result<Report, CliError> {
    let shifts = ShiftParams::new(s.req(a.y1, "y1")?, s.req(a.y2, "y2")?, s.req(a.big_c, "C")?)?;
    let opts = ReportOptions { pad: s.switch(a.pad, "pad")? };
    if let Some(h) = s.opt(a.heights.clone(), "heights")? {
        let heights = parse_list(&h)?;
        let trend = theorem21_trend(&shifts, &heights, opts)?;
        let csv = csv_lines(SumReport::CSV_HEADER, trend.reports.iter().map(SumReport::csv_row));
        return Ok(Report { value: to_value(&trend), csv: Some(csv), passed: trend.passed });
    }
    let big_t = s.req(a.big_t, "T")?;
    let report = match s.opt(a.cache.clone(), "cache")? {
        Some(p) => theorem21_report_with_catalog(&load_cache(&p)?, &shifts, big_t, opts)?,
        None => theorem21_report(&shifts, big_t, opts)?,
    };
    let csv = csv_lines(SumReport::CSV_HEADER, std::iter::once(report.csv_row()));
    Ok(Report { value: to_value(&report), csv: Some(csv), passed: true })
}

fn csv_lines(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn list_or(s: &Scope, flag: &Option<String>, key: &str, default: &[f64]) -> Result<Vec<f64>, UsageError> {
    match s.opt(flag.clone(), key)? {
        Some(v) => parse_list(&v),
        None => Ok(default.to_vec()),
    }
}

fn parse_y_rule(v: &str) -> Result<YRule, UsageError> {
    match v {
        "x_over_log_x" => Ok(YRule::XOverLogX),
        "sqrt_x" => Ok(YRule::SqrtX),
        f => f
            .parse::<f64>()
            .map(YRule::Fraction)
            .map_err(|_| UsageError(format!("y-rule must be x_over_log_x, sqrt_x or a fraction, got {f}"))),
    }
}

fn lemmas(s: &Scope, a: &crate::LemmasArgs) -> Result<Report, CliError> {
    let which = s.get(a.which.clone(), "which", "all".to_string())?;
    let ids: Vec<&str> = match which.as_str() {
        "all" => vec!["3.14", "3.15", "3.16", "3.17", "3.18", "3.19"],
        w @ ("3.14" | "3.15" | "3.16" | "3.17" | "3.18" | "3.19") => vec![w],
        w => return Err(UsageError(format!("unknown lemma {w}")).into()),
    };
    let mut verdicts: Vec<LemmaVerdict> = Vec::new();
    for id in ids {
        let v = match id {
            "3.14" => check_3_14(s.get(a.n_max, "n-max", 100_000usize)?)?,
            "3.15" => check_3_15(&list_or(s, &a.x_grid, "x-grid", &X_GRID)?, s.get(a.c, "c", 0.5)?)?,
            "3.16" => {
                let pairs = match (s.opt(a.a, "a")?, s.opt(a.b, "b")?) {
                    (Some(lo), Some(hi)) => vec![(lo, hi)],
                    (None, None) => default_3_16_pairs(),
                    _ => return Err(UsageError("--a and --b go together".into()).into()),
                };
                check_3_16(&pairs)?
            }
            "3.17" => {
                let rule = parse_y_rule(&s.get(a.y_rule.clone(), "y-rule", "x_over_log_x".to_string())?)?;
                check_3_17(&list_or(s, &a.x_grid, "x-grid", &X_GRID_3_17)?, rule)?
            }
            _ => {
                let variant = if id == "3.18" { ResonanceVariant::Nx } else { ResonanceVariant::NOverX };
                check_3_18_19(&list_or(s, &a.t_grid, "t-grid", &T_GRID_3_18)?, s.get(a.x, "x", 13.0)?, variant)?
            }
        };
        verdicts.push(v);
    }
    let passed = verdicts.iter().all(|v| v.passed);
    let csv = csv_lines(LemmaVerdict::CSV_HEADER, verdicts.iter().map(LemmaVerdict::csv_row));
    Ok(Report { value: to_value(&verdicts), csv: Some(csv), passed })
}

fn parse_family(s: &Scope, a: &crate::PerronArgs) -> Result<CoefficientFamily, UsageError> {
    let alpha = s.get(a.alpha, "alpha", 0.0)?;
    let beta = s.get(a.beta, "beta", 0.0)?;
    match s.get(a.family.clone(), "family", "unit".to_string())?.as_str() {
        "unit" => Ok(CoefficientFamily::unit()),
        "pair_unit" => Ok(CoefficientFamily::pair_unit(alpha)),
        "triple_lambda" => Ok(CoefficientFamily::triple_lambda(alpha, beta)),
        f => Err(UsageError(format!("family must be unit, pair_unit or triple_lambda, got {f}"))),
    }
}

fn perron(s: &Scope, a: &crate::PerronArgs) -> Result<Report, CliError> {
    let family = parse_family(s, a)?;
    let big_x = s.req(a.big_x, "X")?;
    let w = s.req(a.w, "W")?;
    let octaves = s.get(a.octaves, "octaves", 0usize)?;
    let twist = match (s.opt(a.twist_modulus, "twist-modulus")?, s.opt(a.twist_character, "twist-character")?) {
        (Some(modulus), k) => Some(Twist { modulus, character: k.unwrap_or(0) }),
        (None, None) => None,
        (None, Some(_)) => return Err(UsageError("--twist-character needs --twist-modulus".into()).into()),
    };
    if octaves == 0 {
        let r = perron_check(family, big_x, w, twist)?;
        return Ok(Report { value: to_value(&r), csv: None, passed: r.passed });
    }
    let l = perron_ladder(family, big_x, w, octaves, twist)?;
    Ok(Report { value: to_value(&l), csv: None, passed: l.passed })
}

fn contour(s: &Scope, a: &crate::ContourArgs) -> Result<Report, CliError> {
    let cfg = RectangleConfig {
        y1: s.req(a.y1, "y1")?,
        y2: s.req(a.y2, "y2")?,
        x: s.req(a.x, "x")?,
        t1: s.req(a.t1, "t1")?,
        t2: s.req(a.t2, "t2")?,
        b: s.opt(a.b, "b")?,
        c: s.opt(a.c, "c")?,
    };
    if cfg.t1.partial_cmp(&cfg.t2) != Some(std::cmp::Ordering::Less) {
        return Err(UsageError(format!("need t1 < t2, got [{}, {}]", cfg.t1, cfg.t2)).into());
    }
    // margin for edge nudging
    let (catalog, _) = catalog_for(s.opt(a.cache.clone(), "cache")?, (cfg.t1 - 5.0).max(10.0), cfg.t2 + 5.0)?;
    let r = rectangle_identity_check(&cfg, &catalog)?;
    Ok(Report { value: to_value(&r), csv: None, passed: r.passed })
}

fn gonek(s: &Scope, a: &crate::GonekArgs) -> Result<Report, CliError> {
    let r = gonek_check(s.req(a.a, "a")?, s.req(a.b, "b")?, s.req(a.sigma, "sigma")?, s.req(a.u, "u")?, s.get(a.m, "m", 0u32)?)?;
    Ok(Report { value: to_value(&r), csv: None, passed: r.passed })
}

fn appendix(s: &Scope, a: &crate::AppendixArgs) -> Result<Report, CliError> {
    let mode = match s.get(a.mode.clone(), "mode", "sqrt_window".to_string())?.as_str() {
        "sqrt_window" => AppendixMode::SqrtWindow,
        "banks_eps" => AppendixMode::BanksEps,
        m => return Err(UsageError(format!("mode must be sqrt_window or banks_eps, got {m}")).into()),
    };
    let grid = list_or(s, &a.t_grid, "t-grid", &APPENDIX_T_GRID)?;
    let ks = list_or(s, &a.ks, "ks", &[0.5, 1.0, 2.0])?;
    let table = appendix_scan(
        &grid,
        s.get(a.big_c, "C", 1.0)?,
        s.get(a.c_prime, "C-prime", 2.25)?,
        s.get(a.small_c, "c", 3.0)?,
        mode,
        &ks,
    )?;
    let csv = csv_lines(
        "T,k,log_W,b,S,target,ratio",
        table.rows.iter().map(|r| {
            format!(
                "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.t,
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                r.log_w,
                r.b,
                r.s,
                r.target,
                r.ratio
            )
        }),
    );
    Ok(Report { value: to_value(&table), csv: Some(csv), passed: table.passed })
}

/// Tolerance of the character identities.
const CHAR_TOL: f64 = 1e-10;

fn chars(s: &Scope, a: &crate::CharsArgs) -> Result<Report, CliError> {
    let x = s.req(a.x, "x")?;
    let table = build_characters(x)?;
    let sqrt_x = (x as f64).sqrt();
    let mut rows = Vec::new();
    let mut worst_gauss = 0.0f64;
    for k in 0..table.count() {
        let tau = table.gauss_sums[k];
        let order = table.count() / gcd(k, table.count());
        if k > 0 {
            worst_gauss = worst_gauss.max((tau.norm() - sqrt_x).abs());
        }
        rows.push(json!({ "index": k, "order": order, "parity": table.parity(k), "gauss_sum": to_value(&tau), "abs_gauss_sum": tau.norm() }));
    }
    let worst_additive = (1..x as i64)
        .map(|n| additive_to_multiplicative_residual(&table, n))
        .collect::<zetalab::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let v = json!({
        "modulus": x,
        "generator": table.generator,
        "characters": rows,
        "max_gauss_modulus_error": worst_gauss,
        "max_additive_residual": worst_additive,
        "tolerance": CHAR_TOL,
    });
    Ok(Report { value: v, csv: None, passed: worst_gauss <= CHAR_TOL && worst_additive <= CHAR_TOL })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
