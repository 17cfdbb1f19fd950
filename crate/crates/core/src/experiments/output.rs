use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::EpisodeRecord;
use crate::oracle::RolloutMetrics;

/// Writes into a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut builder = tempfile::Builder::new();
    // temp files default to owner-only; outputs are ordinary files
    #[cfg(unix)]
    builder.permissions(std::os::unix::fs::PermissionsExt::from_mode(0o644));
    let mut tmp = builder.tempfile_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Evaluation summary of one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRecord {
    pub policy: String,
    /// Mean weighted age per slot over the common horizon.
    pub age_trajectory: Vec<f64>,
    /// Mean battery quanta per slot over the common horizon.
    pub energy_trajectory: Vec<f64>,
    pub returns: Vec<f64>,
    pub time_avg_aoi: f64,
    pub mean_final_energy: f64,
}

impl PolicyRecord {
    pub fn from_metrics(policy: &str, m: &RolloutMetrics) -> Self {
        Self {
            policy: policy.to_string(),
            age_trajectory: m.age_curve.clone(),
            energy_trajectory: m.energy_curve.clone(),
            returns: m.returns.clone(),
            time_avg_aoi: m.time_avg_aoi,
            mean_final_energy: m.mean_final_energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningRecord {
    pub returns: Vec<f64>,
    pub losses: Vec<Option<f64>>,
    pub epsilons: Vec<f64>,
    pub env_steps: u64,
    pub gradient_steps: u64,
}

impl LearningRecord {
    pub fn from_curve(curve: &[EpisodeRecord], env_steps: u64, gradient_steps: u64) -> Self {
        Self {
            returns: curve.iter().map(|r| r.episode_return).collect(),
            losses: curve.iter().map(|r| r.loss).collect(),
            epsilons: curve.iter().map(|r| r.epsilon).collect(),
            env_steps,
            gradient_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: String,
    pub policy: String,
    pub uavs: usize,
    pub mean_aoi: f64,
    pub mean_final_energy: f64,
    pub seed: u64,
}

/// Everything a CLI command produced; each CSV is rendered from this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning: Option<LearningRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub policies: Vec<PolicyRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
    pub wall_clock_s: f64,
}

impl RunRecord {
    pub fn policy(&self, name: &str) -> Option<&PolicyRecord> {
        self.policies.iter().find(|p| p.policy == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// `episode,return,loss,epsilon`; the loss is empty before the first update.
pub fn learning_curve_csv(l: &LearningRecord) -> Vec<u8> {
    let rows = (0..l.returns.len()).map(|i| {
        vec![
            i.to_string(),
            num(l.returns[i]),
            l.losses[i].map(num).unwrap_or_default(),
            num(l.epsilons[i]),
        ]
    });
    csv_bytes(&["episode", "return", "loss", "epsilon"], rows)
}

fn paired_curve(header: &[&str], dqn: &[f64], rw: &[f64]) -> Vec<u8> {
    let rows = dqn
        .iter()
        .zip(rw)
        .enumerate()
        .map(|(t, (a, b))| vec![t.to_string(), num(*a), num(*b)]);
    csv_bytes(header, rows)
}

/// `slot,mean_age_dqn,mean_age_rw` up to the shorter of the two horizons.
pub fn age_curve_csv(dqn: &PolicyRecord, rw: &PolicyRecord) -> Vec<u8> {
    paired_curve(
        &["slot", "mean_age_dqn", "mean_age_rw"],
        &dqn.age_trajectory,
        &rw.age_trajectory,
    )
}

/// `slot,mean_quanta_dqn,mean_quanta_rw` up to the shorter of the two horizons.
pub fn energy_curve_csv(dqn: &PolicyRecord, rw: &PolicyRecord) -> Vec<u8> {
    paired_curve(
        &["slot", "mean_quanta_dqn", "mean_quanta_rw"],
        &dqn.energy_trajectory,
        &rw.energy_trajectory,
    )
}

pub fn sweep_csv(rows: &[SweepRow]) -> Vec<u8> {
    let rows = rows.iter().map(|r| {
        vec![
            r.axis_value.clone(),
            r.policy.clone(),
            r.uavs.to_string(),
            num(r.mean_aoi),
            num(r.mean_final_energy),
            r.seed.to_string(),
        ]
    });
    csv_bytes(
        &["axis_value", "policy", "uavs", "mean_aoi", "mean_final_energy", "seed"],
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn learning_curve_layout() {
        let l = LearningRecord {
            returns: vec![-12.5, -3.0],
            losses: vec![None, Some(0.25)],
            epsilons: vec![1.0, 0.995],
            env_steps: 7,
            gradient_steps: 1,
        };
        let s = String::from_utf8(learning_curve_csv(&l)).unwrap();
        assert_eq!(s, "episode,return,loss,epsilon\n0,-12.5,,1\n1,-3,0.25,0.995\n");
    }

    #[test]
    fn curves_and_sweep_layout() {
        let p = |name: &str, a: Vec<f64>, e: Vec<f64>| PolicyRecord {
            policy: name.into(),
            age_trajectory: a,
            energy_trajectory: e,
            returns: vec![],
            time_avg_aoi: 0.0,
            mean_final_energy: 0.0,
        };
        let d = p("dqn", vec![1.0, 1.5, 2.0], vec![200.0, 190.0, 180.0]);
        let r = p("rw", vec![1.0, 2.0], vec![200.0, 182.5]);
        let s = String::from_utf8(age_curve_csv(&d, &r)).unwrap();
        assert_eq!(s, "slot,mean_age_dqn,mean_age_rw\n0,1,1\n1,1.5,2\n");
        let s = String::from_utf8(energy_curve_csv(&d, &r)).unwrap();
        assert_eq!(s, "slot,mean_quanta_dqn,mean_quanta_rw\n0,200,200\n1,190,182.5\n");

        let rows = [SweepRow {
            axis_value: "300".into(),
            policy: "rw".into(),
            uavs: 1,
            mean_aoi: 4.25,
            mean_final_energy: 1e-3,
            seed: 2,
        }];
        let s = String::from_utf8(sweep_csv(&rows)).unwrap();
        assert_eq!(
            s,
            "axis_value,policy,uavs,mean_aoi,mean_final_energy,seed\n300,rw,1,4.25,0.001,2\n"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            assert_eq!(std::fs::metadata(&p).unwrap().permissions().mode() & 0o777, 0o644);
        }
    }
}
