//! TOML configuration: sections mirror the four parameter blocks, and every
//! rate key carries an explicit `_annual` or `_monthly` suffix so units are
//! never ambiguous.

use anyhow::{anyhow, bail, Context, Result};
use powerecon::equilibrium::SolverOptions;
use powerecon::params::{
    annual_to_monthly, InstitutionParams, MatchingParams, ModelParams, PreferenceParams,
    TechnologyParams,
};
use powerecon::political::{PoliticalGame, ThreatGame};
use std::collections::BTreeMap;
use std::path::Path;

/// Everything a command can pull from one config file.
pub struct RunConfig {
    pub params: ModelParams,
    pub solver: SolverOptions,
    pub political: Option<ThreatGame>,
    /// Reserved: seeds any randomized diagnostic a future command may add.
    #[allow(dead_code)]
    pub seed: u64,
}

struct Section<'a> {
    name: &'a str,
    table: BTreeMap<String, toml::Value>,
}

impl<'a> Section<'a> {
    fn from(doc: &toml::Table, name: &'a str) -> Result<Self> {
        let table = match doc.get(name) {
            Some(toml::Value::Table(t)) => t.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            Some(_) => bail!("config section [{name}] must be a table"),
            None => bail!("config is missing the [{name}] section"),
        };
        Ok(Section { name, table })
    }

    fn take_f64(&mut self, key: &str) -> Result<f64> {
        self.take_opt_f64(key)?
            .ok_or_else(|| anyhow!("[{}] is missing the key `{key}`", self.name))
    }

    fn take_opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(x)),
            Some(toml::Value::Integer(i)) => Ok(Some(i as f64)),
            Some(other) => bail!("[{}] key `{key}` must be a number, got {other}", self.name),
        }
    }

    /// A monthly rate given either directly or as an annual rate.
    fn take_rate(&mut self, stem: &str) -> Result<f64> {
        let monthly = self.take_opt_f64(&format!("{stem}_monthly"))?;
        let annual = self.take_opt_f64(&format!("{stem}_annual"))?;
        match (monthly, annual) {
            (Some(m), None) => Ok(m),
            (None, Some(a)) => Ok(annual_to_monthly(a)),
            (Some(_), Some(_)) => bail!(
                "[{}] gives both `{stem}_monthly` and `{stem}_annual`; pick one",
                self.name
            ),
            (None, None) => bail!("[{}] needs `{stem}_monthly` or `{stem}_annual`", self.name),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.table.keys().next() {
            bail!("[{}] has an unknown key `{key}`", self.name);
        }
        Ok(())
    }
}

fn matrix(v: &toml::Value, what: &str) -> Result<[[f64; 2]; 2]> {
    let rows = v
        .as_array()
        .ok_or_else(|| anyhow!("{what} must be a 2x2 array of numbers"))?;
    if rows.len() != 2 {
        bail!("{what} must have exactly two rows");
    }
    let mut out = [[0.0; 2]; 2];
    for (j, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| anyhow!("{what} row {j} must be an array"))?;
        if cells.len() != 2 {
            bail!("{what} row {j} must have exactly two entries");
        }
        for (i, cell) in cells.iter().enumerate() {
            out[j][i] = cell
                .as_float()
                .or_else(|| cell.as_integer().map(|x| x as f64))
                .ok_or_else(|| anyhow!("{what}[{j}][{i}] must be a number"))?;
        }
    }
    Ok(out)
}

/// Parse a config file and apply `--set section.key=value` overrides.
pub fn load(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut doc: toml::Table = text
        .parse()
        .with_context(|| format!("parsing config {}", path.display()))?;

    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects section.key=value, got `{item}`"))?;
        let (section, field) = key
            .split_once('.')
            .ok_or_else(|| anyhow!("--set key must be section.key, got `{key}`"))?;
        let parsed: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("--set value for `{key}` must be numeric"))?;
        let entry = doc
            .entry(section.trim().to_string())
            .or_insert(toml::Value::Table(Default::default()));
        match entry {
            toml::Value::Table(t) => {
                t.insert(field.trim().to_string(), toml::Value::Float(parsed));
            }
            _ => bail!("cannot override `{section}`: not a table"),
        }
    }

    let mut tech_s = Section::from(&doc, "technology")?;
    let tech = TechnologyParams {
        sigma: tech_s.take_f64("sigma")?,
        alpha: tech_s.take_f64("alpha")?,
        a_k: tech_s.take_f64("a_k")?,
        delta: tech_s.take_rate("delta")?,
        q_rel: tech_s.take_f64("q")?,
        m: tech_s.take_f64("m")?,
        g: tech_s.take_rate("g")?,
        m_dot: tech_s.take_opt_f64("m_dot_monthly")?.unwrap_or(0.0),
    };
    tech_s.finish()?;

    let mut pref_s = Section::from(&doc, "preferences")?;
    let pref = PreferenceParams {
        rho: pref_s.take_rate("rho")?,
        gamma_f: pref_s.take_f64("gamma_f")?,
        epsilon: pref_s.take_opt_f64("epsilon")?.unwrap_or(1.0),
    };
    pref_s.finish()?;

    let mut match_s = Section::from(&doc, "matching")?;
    let matching = MatchingParams {
        iota: match_s.take_f64("iota")?,
        lambda0: match_s.take_rate("lambda0")?,
        xi: match_s.take_f64("xi")?,
    };
    match_s.finish()?;

    let mut inst_s = Section::from(&doc, "institutions")?;
    let inst = InstitutionParams {
        t_w: inst_s.take_f64("t_w")?,
        p_union: inst_s.take_f64("p_union")?,
        b: inst_s.take_f64("b")?,
        gamma_u: inst_s.take_opt_f64("gamma_u")?.unwrap_or(0.5),
        tau: inst_s.take_opt_f64("tau")?.unwrap_or(0.0),
    };
    inst_s.finish()?;

    let params = ModelParams::new(tech, pref, matching, inst)?;

    let mut solver = SolverOptions::default();
    let mut seed = 0u64;
    if doc.contains_key("solver") {
        let mut s = Section::from(&doc, "solver")?;
        if let Some(x) = s.take_opt_f64("mu_initial")? {
            solver.mu_initial = x;
        }
        if let Some(x) = s.take_opt_f64("mu_damping")? {
            solver.mu_damping = x;
        }
        if let Some(x) = s.take_opt_f64("mu_max_iter")? {
            solver.mu_max_iter = x as u32;
        }
        if let Some(x) = s.take_opt_f64("mu_tol")? {
            solver.mu_tol = x;
        }
        if let Some(x) = s.take_opt_f64("theta_tol")? {
            solver.theta_tol = x;
        }
        if let Some(x) = s.take_opt_f64("seed")? {
            seed = x as u64;
        }
        s.finish()?;
    }

    let political = if doc.contains_key("political") {
        let mut s = Section::from(&doc, "political")?;
        let lambda_w = s.take_f64("lambda_w")?;
        let lambda_g = s.take_f64("lambda_g")?;
        let u_w = matrix(
            s.table
                .remove("u_w")
                .as_ref()
                .ok_or_else(|| anyhow!("[political] is missing `u_w`"))?,
            "[political] u_w",
        )?;
        let u_g = matrix(
            s.table
                .remove("u_g")
                .as_ref()
                .ok_or_else(|| anyhow!("[political] is missing `u_g`"))?,
            "[political] u_g",
        )?;
        let slope_w = match s.table.remove("phi_w") {
            Some(v) => matrix(&v, "[political] phi_w")?,
            None => [[0.0; 2]; 2],
        };
        let slope_g = match s.table.remove("phi_g") {
            Some(v) => matrix(&v, "[political] phi_g")?,
            None => [[0.0; 2]; 2],
        };
        s.finish()?;
        Some(ThreatGame {
            base: PoliticalGame {
                u_w,
                u_g,
                lambda_w,
                lambda_g,
            },
            slope_w,
            slope_g,
        })
    } else {
        None
    };

    Ok(RunConfig {
        params,
        solver,
        political,
        seed,
    })
}
