use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mwl_core::fields::{
    gen_commuting_pair, gen_rotating_weight, GridDomain, MatrixWeightField, ScalarField,
    ScalarProfile, SpectralProfile,
};
use mwl_core::linalg::random_pd;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// How to build one weight field (or a pair, for `commuting`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightRecipe {
    Identity {
        n: usize,
    },
    Scalar {
        profile: ScalarProfile,
    },
    /// Writes `<name>_0` and `<name>_1`.
    Commuting {
        n: usize,
        profile: SpectralProfile,
    },
    Rotating {
        angle: ScalarProfile,
        lambda1: ScalarProfile,
        lambda2: ScalarProfile,
    },
    /// Independent random positive definite values per point.
    RandomPd {
        n: usize,
        log_spread: f64,
    },
}

impl WeightRecipe {
    /// Generated fields with their file stems.
    pub fn build(
        &self,
        name: &str,
        seed: u64,
        domain: GridDomain,
    ) -> Result<Vec<(String, MatrixWeightField)>> {
        let one = |w: MatrixWeightField| Ok(vec![(name.to_string(), w)]);
        match self {
            WeightRecipe::Identity { n } => one(MatrixWeightField::identity(domain, *n)),
            WeightRecipe::Scalar { profile } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let w = ScalarField::new(domain, profile.sample(&domain, &mut rng))?;
                one(MatrixWeightField::scalar(&w)?)
            }
            WeightRecipe::Commuting { n, profile } => {
                let (w0, w1) = gen_commuting_pair(seed, *n, domain, *profile)?;
                Ok(vec![(format!("{name}_0"), w0), (format!("{name}_1"), w1)])
            }
            WeightRecipe::Rotating {
                angle,
                lambda1,
                lambda2,
            } => one(gen_rotating_weight(seed, domain, angle, lambda1, lambda2)?),
            WeightRecipe::RandomPd { n, log_spread } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let vals = (0..domain.len())
                    .map(|_| random_pd(&mut rng, *n, *log_spread))
                    .collect();
                one(MatrixWeightField::new(domain, vals)?)
            }
        }
    }
}

/// Problem sizes of the verification suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sizes {
    pub spectral_pairs: usize,
    pub commuting_pairs: usize,
    pub exactness_tuples: usize,
    pub exactness_points: usize,
    pub convexity_triples: usize,
    pub commutator_points: Vec<usize>,
    pub charact_points: usize,
    pub real_points: usize,
    pub real_samples: usize,
    pub derivation_points: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            spectral_pairs: 1000,
            commuting_pairs: 200,
            exactness_tuples: 200,
            exactness_points: 256,
            convexity_triples: 10_000,
            commutator_points: vec![256, 512, 1024, 2048, 4096],
            charact_points: 512,
            real_points: 64,
            real_samples: 100,
            derivation_points: 128,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub points: usize,
    pub length: f64,
    pub weights: BTreeMap<String, WeightRecipe>,
    pub p_values: Vec<f64>,
    pub thetas: Vec<f64>,
    pub suite: String,
    pub out: PathBuf,
    pub sizes: Sizes,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut weights = BTreeMap::new();
        weights.insert("identity".into(), WeightRecipe::Identity { n: 2 });
        weights.insert(
            "sqrt_sine".into(),
            WeightRecipe::Scalar {
                profile: ScalarProfile::SinePower { exponent: 0.5 },
            },
        );
        weights.insert(
            "commuting".into(),
            WeightRecipe::Commuting {
                n: 2,
                profile: SpectralProfile::Smooth {
                    amplitude: 1.0,
                    modes: 3,
                },
            },
        );
        weights.insert("rotating".into(), rotating_recipe());
        RunConfig {
            seed: 7,
            points: 256,
            length: 1.0,
            weights,
            p_values: vec![1.5, 2.0, 3.0],
            thetas: vec![0.25, 0.5, 0.75],
            suite: "all".into(),
            out: PathBuf::from("mwl-out"),
            sizes: Sizes::default(),
        }
    }
}

/// The 2x2 test weight: angle `2 pi u`, eigenvalues `exp(0.8 sin(2 pi (u + 0.1)))` and `1.5`.
pub fn rotating_recipe() -> WeightRecipe {
    WeightRecipe::Rotating {
        angle: ScalarProfile::Linear {
            offset: 0.2,
            slope: 2.0 * std::f64::consts::PI,
        },
        lambda1: ScalarProfile::ExpSine {
            amplitude: 0.8,
            frequency: 1.0,
            phase: 0.1,
        },
        lambda2: ScalarProfile::Constant { value: 1.5 },
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn domain(&self) -> Result<GridDomain> {
        Ok(GridDomain::new(self.points, self.length)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain()?;
        if self.thetas.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            bail!("theta values must lie in (0, 1)");
        }
        if self.p_values.iter().any(|p| !(*p >= 1.0)) {
            bail!("p values must be at least 1");
        }
        Ok(())
    }

    /// Short digest of the serialized config, excluding the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        digest(&serde_json::to_string(&c).expect("config serializes"))
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

/// Seed for a named sub-task, stable across runs.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let h = Sha256::digest(format!("{seed}:{tag}").as_bytes());
    u64::from_le_bytes(h[..8].try_into().expect("8 bytes"))
}
