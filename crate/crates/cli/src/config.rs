use hermlocal::densities::BruteBudget;
use hermlocal::padic::PrimeContext;
use hermlocal::strata::StrataBudget;
use hermlocal::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u64,
    pub precision: u32,
    pub epsilon_override: Option<u64>,
    pub threads: usize,
    /// Elementary-step budget for brute-force enumeration.
    pub budget: u128,
    pub output_format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 3,
            precision: 8,
            epsilon_override: None,
            threads: 1,
            budget: 1_000_000_000,
            output_format: OutputFormat::Json,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn with_p(p: u64) -> Self {
        RunConfig {
            p,
            ..Self::default()
        }
    }

    pub fn ctx(&self) -> Result<PrimeContext> {
        match self.epsilon_override {
            Some(e) => PrimeContext::with_epsilon(self.p, e, self.precision),
            None => PrimeContext::new(self.p, self.precision),
        }
    }

    pub fn ctx_with_precision(&self, precision: u32) -> Result<PrimeContext> {
        self.ctx()?.with_precision(precision)
    }

    pub fn brute_budget(&self) -> BruteBudget {
        BruteBudget {
            max_steps: self.budget,
        }
    }

    pub fn strata_budget(&self) -> StrataBudget {
        StrataBudget::default()
    }

    pub fn epsilon(&self) -> Result<u64> {
        Ok(self.ctx()?.epsilon())
    }
}

/// Parse `1e9`, `1000000000` or `10^9`.
pub fn parse_budget(s: &str) -> Result<u128> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: u128 = b
            .parse()
            .map_err(|_| Error::Parse(format!("bad budget {s}")))?;
        let e: u32 = e
            .parse()
            .map_err(|_| Error::Parse(format!("bad budget {s}")))?;
        return b
            .checked_pow(e)
            .ok_or_else(|| Error::Parse(format!("budget {s} overflows")));
    }
    if let Ok(v) = s.parse::<u128>() {
        return Ok(v);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad budget {s}")))?;
    if !(f.is_finite() && (0.0..1e38).contains(&f)) {
        return Err(Error::Parse(format!("bad budget {s}")));
    }
    Ok(f.round() as u128)
}
