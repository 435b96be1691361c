use std::fmt;
use std::str::FromStr;

use fdmix::Fidelity;

use crate::error::CliError;

/// Evaluation engines, in output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Analytic,
    McModel,
    McVoronoi,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Analytic, Engine::McModel, Engine::McVoronoi];

    pub fn label(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::McModel => "mc-model",
            Engine::McVoronoi => "mc-voronoi",
        }
    }

    /// Column name in CCDF tables.
    pub fn column(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::McModel => "mc_model",
            Engine::McVoronoi => "mc_voronoi",
        }
    }

    pub fn fidelity(self) -> Option<Fidelity> {
        match self {
            Engine::Analytic => None,
            Engine::McModel => Some(Fidelity::Model),
            Engine::McVoronoi => Some(Fidelity::Voronoi),
        }
    }

    /// Parses `analytic`, `mc-model`, `mc-voronoi` or `all`, returning the
    /// engines sorted and deduplicated.
    pub fn parse_selection<S: AsRef<str>>(items: &[S]) -> Result<Vec<Engine>, CliError> {
        let mut out = Vec::new();
        for item in items {
            match item.as_ref() {
                "all" => out.extend(Engine::ALL),
                s => out.push(s.parse()?),
            }
        }
        if out.is_empty() {
            return Err(CliError::usage("no engine selected"));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Engine {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.label() == s)
            .ok_or_else(|| CliError::usage(format!("unknown engine `{s}` (analytic, mc-model, mc-voronoi, all)")))
    }
}
