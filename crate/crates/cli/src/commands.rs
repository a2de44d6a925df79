use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use skbench::analysis::{
    calibrate_toffoli_time, estimate_table, estimates_to_csv, fit_all, measure_flop_model,
    ResourceModel, ScalingFit,
};
use skbench::benchmark::{
    box_stats, ratio_gap_series, record_csv_line, records_from_csv, records_to_csv, run_suite_with,
    summarize, BenchConfig, BenchRecord, BoxStats, CellKey, Method, SeriesPoint, Status,
    RECORD_HEADER,
};
use skbench::sk_model::{generate_eligible, EnergyTable, SkInstance, SolvedInstance, Spectrum};

use crate::config::{ConfigError, FlopSource, RunConfig};

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// Some cells reached the step cap; their rows are flagged unresolved.
    Partial,
}

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunDir { root: root.into() }
    }

    pub fn instance(&self, n: usize, index: usize) -> PathBuf {
        self.root
            .join("instances")
            .join(format!("n{n}"))
            .join(format!("inst{index:03}.json"))
    }

    pub fn records(&self) -> PathBuf {
        self.root.join("records.csv")
    }

    pub fn partial_records(&self) -> PathBuf {
        self.root.join("records.partial.csv")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    pub fn summary(&self) -> PathBuf {
        self.root.join("summary.json")
    }

    pub fn fits(&self) -> PathBuf {
        self.root.join("fits.json")
    }

    pub fn estimates(&self) -> PathBuf {
        self.root.join("estimates.csv")
    }

    pub fn estimate_details(&self) -> PathBuf {
        self.root.join("estimates.json")
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStatus {
    pub method: Method,
    pub n: usize,
    pub instance: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// SHA-256 of the canonical JSON form of the sweep settings.
    pub config_hash: String,
    pub config: BenchConfig,
    pub cells_total: usize,
    pub cells: Vec<CellStatus>,
    pub outputs: BTreeMap<String, String>,
}

pub fn config_hash(config: &BenchConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
}

fn solve_loaded(instance: SkInstance, index: usize, cap: usize) -> anyhow::Result<SolvedInstance> {
    let table = EnergyTable::build(&instance, cap)?;
    let spectrum = Spectrum::from_table(&table);
    if spectrum.e_gs() >= 0.0 {
        bail!(ConfigError(format!(
            "instance n={} index={index} has E_gs = {} >= 0",
            instance.n(),
            spectrum.e_gs()
        )));
    }
    Ok(SolvedInstance {
        index,
        instance,
        table,
        spectrum,
        regenerated: 0,
    })
}

/// Writes one JSON file per `(n, index)`. Existing identical files are left
/// alone; differing ones are an error unless `force`.
pub fn cmd_generate(cfg: &RunConfig, dir: &RunDir, force: bool) -> anyhow::Result<usize> {
    let bench = &cfg.bench;
    let mut written = 0;
    for &n in &bench.sizes {
        for index in 0..bench.instances_per_size {
            let solved = generate_eligible(n, bench.master_seed, index, bench.spectrum_cap)?;
            let text = solved.instance.to_json();
            let path = dir.instance(n, index);
            if let Ok(existing) = fs::read_to_string(&path) {
                if existing == text {
                    continue;
                }
                if !force {
                    bail!(ConfigError(format!(
                        "{} exists with different contents; pass --force to overwrite",
                        path.display()
                    )));
                }
            }
            write_atomic(&path, text.as_bytes())?;
            written += 1;
        }
    }
    log::info!(
        "wrote {written} instance files under {}",
        dir.root.display()
    );
    Ok(written)
}

/// Loads every instance file of the sweep, generating the missing ones.
/// Existing files are used as they are, so hand-edited instances are
/// honoured.
fn load_or_generate(
    cfg: &RunConfig,
    dir: &RunDir,
) -> anyhow::Result<BTreeMap<(usize, usize), SolvedInstance>> {
    let bench = &cfg.bench;
    let mut out = BTreeMap::new();
    for &n in &bench.sizes {
        for index in 0..bench.instances_per_size {
            let path = dir.instance(n, index);
            let solved = match fs::read_to_string(&path) {
                Ok(text) => {
                    let inst = SkInstance::from_json(&text)
                        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
                    if inst.n() != n {
                        bail!(ConfigError(format!(
                            "{} holds n = {}, expected {n}",
                            path.display(),
                            inst.n()
                        )));
                    }
                    solve_loaded(inst, index, bench.spectrum_cap)?
                }
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    let solved =
                        generate_eligible(n, bench.master_seed, index, bench.spectrum_cap)?;
                    write_atomic(&path, solved.instance.to_json().as_bytes())?;
                    solved
                }
                Err(e) => {
                    return Err(anyhow::Error::new(e).context(format!("reading {}", path.display())))
                }
            };
            out.insert((n, index), solved);
        }
    }
    Ok(out)
}

/// Runs every cell not already recorded, appending each result as it
/// finishes, then writes the canonical record CSV, a summary and the
/// manifest.
pub fn cmd_bench(cfg: &RunConfig, dir: &RunDir, force: bool) -> anyhow::Result<Outcome> {
    let bench = &cfg.bench;
    let hash = config_hash(bench);
    fs::create_dir_all(&dir.root).with_context(|| format!("creating {}", dir.root.display()))?;

    let mut done: Vec<BenchRecord> = Vec::new();
    if force {
        let _ = fs::remove_file(dir.partial_records());
        cmd_generate(cfg, dir, true)?;
    } else if let Ok(old) = read_json::<RunManifest>(&dir.manifest()) {
        if old.config_hash != hash {
            bail!(ConfigError(format!(
                "{} was produced with different settings; pass --force to start over",
                dir.root.display()
            )));
        }
    }
    if !force {
        if let Ok(text) = fs::read_to_string(dir.partial_records()) {
            done = records_from_csv(&text)?;
        } else if let Ok(text) = fs::read_to_string(dir.records()) {
            done = records_from_csv(&text)?;
        }
    }
    let wanted: HashSet<CellKey> = bench.cells().into_iter().collect();
    done.retain(|r| wanted.contains(&r.key()));
    let have: HashSet<CellKey> = done.iter().map(BenchRecord::key).collect();
    log::info!("{} of {} cells already recorded", have.len(), wanted.len());

    let pending = wanted.len() - have.len();
    if pending > 0 {
        write_manifest(dir, bench, &hash, &done)?;
        let instances = load_or_generate(cfg, dir)?;
        // Rewrite the append log so a torn last line never precedes new rows.
        let mut log_text = String::from(RECORD_HEADER);
        log_text.push('\n');
        for r in &done {
            log_text.push_str(&record_csv_line(r));
            log_text.push('\n');
        }
        write_atomic(&dir.partial_records(), log_text.as_bytes())?;
        let file = OpenOptions::new()
            .append(true)
            .open(dir.partial_records())
            .with_context(|| format!("opening {}", dir.partial_records().display()))?;
        let sink = Mutex::new(file);
        let failed = Mutex::new(None::<std::io::Error>);
        let fresh = run_suite_with(
            bench,
            &instances,
            |c| have.contains(c),
            |r| {
                let line = format!("{}\n", record_csv_line(r));
                let mut f = sink.lock().expect("record sink");
                if let Err(e) = f.write_all(line.as_bytes()).and_then(|_| f.flush()) {
                    failed.lock().expect("error slot").get_or_insert(e);
                }
            },
        )?;
        if let Some(e) = failed.into_inner().expect("error slot") {
            return Err(anyhow::Error::new(e).context("appending records"));
        }
        done.extend(fresh);
    }

    let order: BTreeMap<CellKey, usize> = bench
        .cells()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    done.sort_by_key(|r| order[&r.key()]);
    write_atomic(&dir.records(), records_to_csv(&done).as_bytes())?;
    let summary = summarize(&done);
    write_atomic(
        &dir.summary(),
        serde_json::to_string_pretty(&summary)?.as_bytes(),
    )?;
    let _ = fs::remove_file(dir.partial_records());

    write_manifest(dir, bench, &hash, &done)?;

    let unresolved = done.iter().filter(|r| !r.is_resolved()).count();
    if unresolved > 0 {
        log::warn!("{unresolved} cells hit the step cap and are excluded from fits");
        Ok(Outcome::Partial)
    } else {
        Ok(Outcome::Complete)
    }
}

fn write_manifest(
    dir: &RunDir,
    bench: &BenchConfig,
    hash: &str,
    done: &[BenchRecord],
) -> anyhow::Result<()> {
    let mut outputs = BTreeMap::new();
    outputs.insert("records".into(), "records.csv".into());
    outputs.insert("summary".into(), "summary.json".into());
    outputs.insert("instances".into(), "instances".into());
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config_hash: hash.into(),
        config: bench.clone(),
        cells_total: bench.cells().len(),
        cells: done
            .iter()
            .map(|r| CellStatus {
                method: r.method,
                n: r.n,
                instance: r.instance,
                status: r.status,
            })
            .collect(),
        outputs,
    };
    write_atomic(
        &dir.manifest(),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )
}

fn load_records(dir: &RunDir) -> anyhow::Result<Vec<BenchRecord>> {
    let path = dir.records();
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading {}; run bench first", path.display()))?;
    Ok(records_from_csv(&text)?)
}

pub fn cmd_fit(dir: &RunDir) -> anyhow::Result<Vec<ScalingFit>> {
    let records = load_records(dir)?;
    let fits = fit_all(&records).map_err(|e| ConfigError(format!("fit refused: {e}")))?;
    for f in &fits {
        log::info!(
            "{}: {:.3} x 2^({:.3} n), residual {:.3}",
            f.method,
            f.b,
            f.c,
            f.residual
        );
    }
    write_atomic(&dir.fits(), serde_json::to_string_pretty(&fits)?.as_bytes())?;
    Ok(fits)
}

#[derive(Debug, Serialize)]
struct EstimateDetails<'a> {
    model: &'a ResourceModel,
    seconds_per_toffoli_source: String,
    gas_log_term: &'static str,
}

pub fn cmd_estimate(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<()> {
    let fits: Vec<ScalingFit> = if dir.fits().exists() {
        read_json(&dir.fits())?
    } else {
        cmd_fit(dir)?
    };
    let est = &cfg.estimate;
    let mut model = ResourceModel {
        flops_per_second: est.flops_per_second,
        ..ResourceModel::default()
    };
    if est.flop_source == FlopSource::Measured {
        let seed = cfg.bench.master_seed;
        model.bf_flops = measure_flop_model(
            Method::BruteForce,
            &est.flop_sizes,
            est.flop_instances,
            est.flop_steps,
            seed,
        )?
        .1;
        model.rs_flops = measure_flop_model(
            Method::RandomSampling,
            &est.flop_sizes,
            est.flop_instances,
            est.flop_steps,
            seed,
        )?
        .1;
        model.mh_flops = measure_flop_model(
            Method::MetropolisHastings,
            &est.flop_sizes,
            est.flop_instances,
            est.flop_steps,
            seed,
        )?
        .1;
    }
    let source = match est.seconds_per_toffoli {
        Some(s) => {
            model.seconds_per_toffoli = s;
            "configured".to_string()
        }
        None => {
            let anchor = fits
                .iter()
                .find(|f| f.method == est.anchor_method)
                .ok_or_else(|| {
                    ConfigError(format!(
                        "no {} fit to calibrate against; set seconds_per_toffoli",
                        est.anchor_method
                    ))
                })?;
            model.seconds_per_toffoli = calibrate_toffoli_time(
                est.anchor_method,
                est.anchor_n,
                est.anchor_days,
                &anchor.law(),
                &model,
            )?;
            format!(
                "calibrated on {} n={} = {:e} days",
                est.anchor_method, est.anchor_n, est.anchor_days
            )
        }
    };
    let rows = estimate_table(&fits, &est.sizes, &model)?;
    write_atomic(&dir.estimates(), estimates_to_csv(&rows).as_bytes())?;
    let details = EstimateDetails {
        model: &model,
        seconds_per_toffoli_source: source,
        gas_log_term: "dropped",
    };
    write_atomic(
        &dir.estimate_details(),
        serde_json::to_string_pretty(&details)?.as_bytes(),
    )?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct RatioGapStats {
    n: usize,
    stats: BoxStats,
    /// Share of instances with `E_1 / E_gs <= alpha`.
    within_alpha: f64,
}

#[derive(Debug, Serialize)]
struct ReportBundle {
    alpha: f64,
    series: Vec<SeriesPoint>,
    fits: Vec<ScalingFit>,
    ratio_gap: Vec<RatioGapStats>,
}

/// Plot-ready data: one step series per method, the fits, and ratio-gap
/// statistics per size.
pub fn cmd_report(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<()> {
    let records = load_records(dir)?;
    let series = summarize(&records);
    let fits: Vec<ScalingFit> = if dir.fits().exists() {
        read_json(&dir.fits())?
    } else {
        cmd_fit(dir)?
    };
    let out = dir.report();
    let mut methods: Vec<Method> = series.iter().map(|p| p.method).collect();
    methods.dedup();
    for m in methods {
        let mut csv = String::from(
            "n,mean,resolved,unresolved,min,whisker_low,q1,median,q3,whisker_high,max\n",
        );
        for p in series.iter().filter(|p| p.method == m) {
            let s = &p.stats;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                p.n,
                p.mean_steps,
                p.resolved,
                p.unresolved,
                s.min,
                s.whisker_low,
                s.q1,
                s.median,
                s.q3,
                s.whisker_high,
                s.max
            ));
        }
        write_atomic(&out.join(format!("series_{m}.csv")), csv.as_bytes())?;
    }

    let rep = &cfg.report;
    let samples = ratio_gap_series(
        &rep.ratio_gap_sizes,
        rep.ratio_gap_instances,
        cfg.bench.master_seed,
        cfg.bench.spectrum_cap,
    )?;
    let mut csv = String::from("n,instance,e_gs,e_1,ratio\n");
    for s in &samples {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            s.n, s.instance, s.e_gs, s.e_1, s.ratio
        ));
    }
    write_atomic(&out.join("ratio_gap.csv"), csv.as_bytes())?;
    let alpha = cfg.bench.alpha;
    let ratio_gap = rep
        .ratio_gap_sizes
        .iter()
        .map(|&n| {
            let r: Vec<f64> = samples
                .iter()
                .filter(|s| s.n == n)
                .map(|s| s.ratio)
                .collect();
            Ok(RatioGapStats {
                n,
                within_alpha: r.iter().filter(|&&v| v <= alpha).count() as f64 / r.len() as f64,
                stats: box_stats(&r)?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let bundle = ReportBundle {
        alpha,
        series,
        fits,
        ratio_gap,
    };
    write_atomic(
        &out.join("bundle.json"),
        serde_json::to_string_pretty(&bundle)?.as_bytes(),
    )?;
    Ok(())
}

pub fn load_config(path: Option<&Path>) -> anyhow::Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}
