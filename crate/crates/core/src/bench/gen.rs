//! Seeded synthetic datasets.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{HstiError, Result};
use crate::geo::{STObject, WorldBounds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    Uniform,
    /// `clusters` centers drawn uniformly over the plane; each point takes a
    /// random center plus isotropic Gaussian spread `sigma`, clipped to the
    /// world. Timestamps stay uniform.
    Clustered { clusters: usize, sigma: f64 },
}

impl Distribution {
    pub fn name(&self) -> String {
        match self {
            Distribution::Uniform => "uniform".into(),
            Distribution::Clustered { clusters, sigma } => format!("clustered-c{clusters}-s{sigma}"),
        }
    }
}

pub fn generate(n: usize, dist: Distribution, world: &WorldBounds, seed: u64) -> Result<Vec<STObject>> {
    if n == 0 {
        return Err(HstiError::InvalidConfig("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Distribution::Uniform => Ok((0..n)
            .map(|i| {
                STObject::new(
                    i as u64,
                    rng.random_range(0.0..=world.x_max),
                    rng.random_range(0.0..=world.y_max),
                    rng.random_range(0.0..=world.t_max),
                )
            })
            .collect()),
        Distribution::Clustered { clusters, sigma } => {
            if clusters == 0 || !(sigma.is_finite() && sigma >= 0.0) {
                return Err(HstiError::InvalidConfig(format!(
                    "clustered data needs clusters >= 1 and a finite sigma >= 0, got {clusters}, {sigma}"
                )));
            }
            let centers: Vec<(f64, f64)> = (0..clusters)
                .map(|_| (rng.random_range(0.0..=world.x_max), rng.random_range(0.0..=world.y_max)))
                .collect();
            let spread = Normal::new(0.0, sigma).expect("sigma validated");
            Ok((0..n)
                .map(|i| {
                    let (cx, cy) = centers[rng.random_range(0..clusters)];
                    let x = (cx + spread.sample(&mut rng)).clamp(0.0, world.x_max);
                    let y = (cy + spread.sample(&mut rng)).clamp(0.0, world.y_max);
                    STObject::new(i as u64, x, y, rng.random_range(0.0..=world.t_max))
                })
                .collect())
        }
    }
}

/// Writes `oid,x,y,t` rows under a header line.
pub fn write_csv(objects: &[STObject], mut out: impl Write) -> Result<()> {
    writeln!(out, "oid,x,y,t")?;
    for o in objects {
        writeln!(out, "{},{},{},{}", o.oid, o.x, o.y, o.t)?;
    }
    out.flush()?;
    Ok(())
}
