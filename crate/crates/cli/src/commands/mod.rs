//! One function per command. Each decodes its parameters, runs the
//! experiment and records checks, payload and an optional table.

mod dynamics;
mod geometry;
mod structure;

use crate::{Command, Outcome, Scenario};
use crate::CliError;

pub(crate) fn dispatch(s: &Scenario) -> Result<Outcome, CliError> {
    match s.command {
        Command::Validate => geometry::validate(s),
        Command::Fresnel => geometry::fresnel(s),
        Command::Singular => geometry::singular(s),
        Command::Curvature => geometry::curvature(s),
        Command::Classify => geometry::classify(s),
        Command::IdentitySuite => geometry::identity_suite(s),
        Command::Propagate => dynamics::propagate(s),
        Command::Decay => dynamics::decay(s),
        Command::Strichartz => dynamics::strichartz(s),
        Command::Gronwall => dynamics::gronwall(s),
        Command::Eigenfield => structure::eigenfield(s),
        Command::Holonomy => structure::holonomy(s),
        Command::Symmetrizer => structure::symmetrizer(s),
        Command::Fbi => structure::fbi(s),
    }
}

fn fmt3(v: [f64; 3]) -> [String; 3] {
    v.map(|x| x.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "nan".into())
}

fn is_isotropic(m: &anisomax::tensors::DiagonalMaterial) -> bool {
    let r = m.ratios();
    let scale = r.iter().cloned().fold(0.0, f64::max);
    (r[0] - r[1]).abs() <= 1e-12 * scale && (r[1] - r[2]).abs() <= 1e-12 * scale
}
