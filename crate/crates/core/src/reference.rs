//! The reference maps shipped with the crate.
//!
//! | name | map | V |
//! |---|---|---|
//! | `doubling` | `z^2` | disc of radius 4 |
//! | `chebyshev` | `z^2 - 2` | disc of radius 4 |
//! | `skew` | `(4 z1 + z2^2, z2^2)` | bidisc of radius 2 |
//! | `skew_p0` | `(4 z1, z2^2)` | bidisc of radius 2 |
//! | `torus` | `(z^2, w^2)` | product of annuli `1/2 < |.| < 2` |
//! | `wd2z` | `(w^3, 2z)` | bidisc of radius 2 |

use crate::error::{Error, Result};
use crate::maps::{parse_map_spec, MapSpec};

pub const REFERENCE_NAMES: [&str; 6] =
    ["doubling", "chebyshev", "skew", "skew_p0", "torus", "wd2z"];

/// The JSON source of a reference map.
pub fn reference_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "doubling" => include_str!("../reference_maps/doubling.json"),
        "chebyshev" => include_str!("../reference_maps/chebyshev.json"),
        "skew" => include_str!("../reference_maps/skew.json"),
        "skew_p0" => include_str!("../reference_maps/skew_p0.json"),
        "torus" => include_str!("../reference_maps/torus.json"),
        "wd2z" => include_str!("../reference_maps/wd2z.json"),
        _ => return None,
    })
}

pub fn reference_map(name: &str) -> Result<MapSpec> {
    let src = reference_source(name).ok_or_else(|| {
        Error::InvalidInput(format!(
            "unknown reference map `{name}` (known: {})",
            REFERENCE_NAMES.join(", ")
        ))
    })?;
    parse_map_spec(src)
}
