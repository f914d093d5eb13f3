//! Domain selection: four named verification domains or a domain file.

use std::path::Path;

use cornerhodge::polygeom::{
    pentagon_notched_domain, read_domain, triangle_notched_domain, FoldPairParams,
    PolygonalDomain,
};

use crate::config::CliError;

pub const NAMED: [&str; 4] =
    ["square-annulus", "unit-square", "pentagon-notched", "triangle-notched"];

pub fn resolve(selector: &str) -> Result<PolygonalDomain, CliError> {
    match selector {
        "square-annulus" => Ok(PolygonalDomain::square_annulus()),
        "unit-square" => Ok(PolygonalDomain::unit_square()),
        "pentagon-notched" => Ok(pentagon_notched_domain(&FoldPairParams::default())?),
        "triangle-notched" => Ok(triangle_notched_domain(&FoldPairParams::default())?),
        other => {
            let path = Path::new(other);
            if path.is_file() {
                Ok(read_domain(path)?)
            } else {
                Err(CliError::Usage(format!(
                    "unknown domain `{other}`; pick one of {} or pass a domain file",
                    NAMED.join(", ")
                )))
            }
        }
    }
}

/// The domains the default `chi` run covers.
pub fn all_named() -> Result<Vec<PolygonalDomain>, CliError> {
    NAMED.iter().map(|name| resolve(name)).collect()
}
