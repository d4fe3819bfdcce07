//! Run settings: flags override the `--config` file, which overrides the
//! per-command defaults. The resolved values are echoed into the manifest.

use std::path::Path;

use clap::Args;
use serde::{Deserialize, Serialize};

/// Options shared by every subcommand. All optional so that the config file
/// and the command defaults can fill the gaps.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Word length / step count, depending on the command.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Tolerance schedule: inv_n, inv_2n or inv_pow2.
    #[arg(long, global = true)]
    pub beta: Option<String>,
    /// Registry name of a vertex or set function, e.g. minfun:phi_u.
    #[arg(long = "fn", global = true)]
    #[serde(rename = "fn")]
    pub func: Option<String>,
    /// explicit:n, single:n[:phi], sum:n:phi*λ,…, countable:n, points:x,…, file:path
    #[arg(long, global = true)]
    pub set: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Steps per trajectory.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub radius: Option<u32>,
    /// Start vertex (`p` or a dyadic such as 3/2^3).
    #[arg(long, global = true)]
    pub x: Option<String>,
    #[arg(long, global = true)]
    pub y: Option<String>,
    /// lr or rl.
    #[arg(long, global = true)]
    pub orientation: Option<String>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Longest lamplighter word enumerated exactly.
    #[arg(long, global = true)]
    pub word_len: Option<usize>,
    /// Largest orbit enumerated before giving up.
    #[arg(long, global = true)]
    pub orbit_size: Option<usize>,
}

impl Overrides {
    /// Field-wise `self` if set, else `other`.
    pub fn or(self, other: Overrides) -> Overrides {
        Overrides {
            n: self.n.or(other.n),
            beta: self.beta.or(other.beta),
            func: self.func.or(other.func),
            set: self.set.or(other.set),
            seed: self.seed.or(other.seed),
            cap: self.cap.or(other.cap),
            trials: self.trials.or(other.trials),
            samples: self.samples.or(other.samples),
            radius: self.radius.or(other.radius),
            x: self.x.or(other.x),
            y: self.y.or(other.y),
            orientation: self.orientation.or(other.orientation),
            threads: self.threads.or(other.threads),
            word_len: self.word_len.or(other.word_len),
            orbit_size: self.orbit_size.or(other.orbit_size),
        }
    }

    /// A settings object, or a manifest whose `settings` key holds one.
    pub fn load(path: &Path) -> Result<Overrides, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        let mut v: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))?;
        if let Some(s) = v.get_mut("settings") {
            v = s.take();
        }
        serde_json::from_value(v).map_err(|e| format!("{}: {e}", path.display()))
    }
}
