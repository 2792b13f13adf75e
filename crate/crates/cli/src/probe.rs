//! `probe`: inequality ensembles and the transport-diffusion sweep.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bqp_core::diagnostics::{
    format_float, inequality_probe, trans_diff_bound_probe, write_probe_csv, write_td_csv, ProbeId,
};

use crate::config::Config;
use crate::error::CliError;

/// Names accepted for the transport-diffusion sweep.
pub const SWEEP_IDS: [&str; 4] = ["transdiff", "prop_2_1", "prop_2_2", "trans_diff"];

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    pub name: String,
    pub path: PathBuf,
    pub max_ratio: [f64; 2],
    pub growth: f64,
    pub all_finite: bool,
}

impl ProbeOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "probe={} max_ratio_n={} max_ratio_2n={} growth={} finite={}",
            self.name,
            format_float(self.max_ratio[0]),
            format_float(self.max_ratio[1]),
            format_float(self.growth),
            self.all_finite
        )
    }
}

/// Runs probe `lemma` (`all` runs every probe listed in `[probe].lemmas`).
pub fn cmd_probe(
    cfg: &Config,
    lemma: &str,
    out_dir: &Path,
    size: Option<usize>,
    seed: Option<u64>,
) -> Result<Vec<ProbeOutcome>, CliError> {
    let names: Vec<String> = if lemma.eq_ignore_ascii_case("all") {
        cfg.probe.lemmas.clone()
    } else {
        vec![lemma.to_string()]
    };
    // Resolve everything before doing any work, so that bad input fails fast.
    enum Job {
        Ensemble(ProbeId),
        Sweep,
    }
    let jobs = names
        .iter()
        .map(|n| {
            if SWEEP_IDS.iter().any(|s| s.eq_ignore_ascii_case(n)) {
                cfg.sweep(seed)?;
                Ok(Job::Sweep)
            } else {
                let id: ProbeId = n.parse().map_err(|e: bqp_core::Error| CliError::Config(e.to_string()))?;
                cfg.ensemble(id, size, seed)?;
                Ok(Job::Ensemble(id))
            }
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    fs::create_dir_all(out_dir)?;
    let hash = cfg.hash();
    let mut out = Vec::new();
    for job in jobs {
        match job {
            Job::Ensemble(id) => {
                let ens = cfg.ensemble(id, size, seed)?;
                let rep = inequality_probe(id, &ens)?;
                let path = out_dir.join(format!("probe_{id}.csv"));
                let mut w = BufWriter::new(File::create(&path)?);
                write_probe_csv(&mut w, &hash, &rep)?;
                w.flush()?;
                out.push(ProbeOutcome {
                    name: id.to_string(),
                    path,
                    max_ratio: rep.max_ratio,
                    growth: rep.growth,
                    all_finite: rep.all_finite(),
                });
            }
            Job::Sweep => {
                let rep = trans_diff_bound_probe(&cfg.sweep(seed)?)?;
                let path = out_dir.join("probe_transdiff.csv");
                let mut w = BufWriter::new(File::create(&path)?);
                write_td_csv(&mut w, &hash, &rep)?;
                w.flush()?;
                let finite = rep.rows.iter().all(|r| r.lhs.iter().chain(&r.rhs).all(|v| v.is_finite()));
                out.push(ProbeOutcome {
                    name: "transdiff".into(),
                    path,
                    max_ratio: rep.max_ratio,
                    growth: rep.growth,
                    all_finite: finite,
                });
            }
        }
    }
    Ok(out)
}
