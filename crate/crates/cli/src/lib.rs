//! Configuration loading, suite orchestration and reporting for the
//! `heckeforge` binary.

pub mod config;

use std::fmt::Write;
use std::time::{Duration, Instant};

use heckeforge::apartment::{face_counts, Apartment};
use heckeforge::field::Field;
use heckeforge::hecke::{Flavor, HeckeAlgebra};
use heckeforge::parahoric::Parahoric;
use heckeforge::rootdata::RootDatum;
use heckeforge::suites::{run_suite, SuiteOutcome, CENTRAL_CAP};
use heckeforge::weyl::WeylGroup;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{ConfigError, RunConfig};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub passed: bool,
    pub suites: Vec<SuiteOutcome>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the configured suites concurrently. Wall-clock times are returned
/// beside the report so the report itself stays reproducible.
pub fn run(cfg: &RunConfig) -> (Report, Vec<Duration>) {
    let sc = cfg.suite_config();
    let timed: Vec<(SuiteOutcome, Duration)> = heckeforge::with_field!(cfg.characteristic, K => {
        cfg.suites
            .par_iter()
            .map(|name| {
                let start = Instant::now();
                let outcome = run_suite::<K>(name, &sc);
                (outcome, start.elapsed())
            })
            .collect()
    })
    .expect("characteristic checked by the config");
    let (suites, times): (Vec<_>, Vec<_>) = timed.into_iter().unzip();
    let passed = suites.iter().all(|s| !s.failed());
    let report = Report { tool: "heckeforge", version: env!("CARGO_PKG_VERSION"), config: cfg.clone(), passed, suites };
    (report, times)
}

/// Static inventory of a configuration: `Pi_aff`, `Omega`, the face
/// representatives, parahoric dimensions and `dim F_n H`.
pub fn describe(cfg: &RunConfig) -> Result<String, String> {
    heckeforge::with_field!(cfg.characteristic, K => describe_over::<K>(cfg)).expect("characteristic checked by the config")
}

fn describe_over<F: Field>(cfg: &RunConfig) -> Result<String, String> {
    let rd = RootDatum::new(cfg.cartan, cfg.isogeny).map_err(|e| e.to_string())?;
    let w = WeylGroup::new(rd);
    let cap = if w.is_semisimple() { None } else { Some(CENTRAL_CAP) };
    let h = HeckeAlgebra::<F>::new(w.clone(), cfg.q, Flavor::ProP).map_err(|e| e.to_string())?;
    let apt = Apartment::new(&w, false);
    let mut s = String::new();
    let rd = &w.rd;
    writeln!(s, "root datum: {}, q = {}, field {}", rd.label(), cfg.q, cfg.field).unwrap();
    writeln!(s, "Pi_aff ({} roots):", w.aff.len()).unwrap();
    for (j, a) in w.aff.iter().enumerate() {
        writeln!(s, "  A_{j} = ({:?}, {})", rd.roots[a.root].coords, a.level).unwrap();
    }
    if w.is_semisimple() {
        writeln!(s, "|Omega| = {}", w.omega_fin.len()).unwrap();
    } else {
        writeln!(s, "|Omega| = infinite (torsion part {}, central rank {})", w.omega_fin.len(), w.central.len()).unwrap();
    }
    writeln!(s, "|T0/T1| = {}", h.group.torus_elements().len()).unwrap();
    for (i, n) in face_counts(&apt).iter().enumerate() {
        let masks: Vec<String> = apt.reps[i].iter().map(|r| format!("{:#b}", r.mask)).collect();
        writeln!(s, "F_{i}: {n} facet{} (masks {})", if *n == 1 { "" } else { "s" }, masks.join(", ")).unwrap();
    }
    writeln!(s, "parahoric subalgebras (mask: dim H_F, dim H_F^dagger):").unwrap();
    for mask in 0..w.full_mask() {
        let plain = Parahoric::new(&h, mask, false).map_err(|e| e.to_string())?.dim();
        let dagger = match Parahoric::new(&h, mask, true) {
            Ok(p) => p.dim().to_string(),
            Err(_) => "infinite".into(),
        };
        writeln!(s, "  {mask:#b}: {plain}, {dagger}").unwrap();
    }
    let note = if cap.is_some() { format!(" (central degree <= {CENTRAL_CAP})") } else { String::new() };
    let dims: Vec<String> = (0..=cfg.n_max)
        .map(|n| h.filtration_basis(n, cap).map(|b| b.len().to_string()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    writeln!(s, "dim F_n H for n = 0..={}{note}: {}", cfg.n_max, dims.join(", ")).unwrap();
    Ok(s)
}
