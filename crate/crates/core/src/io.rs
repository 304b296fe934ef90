//! Versioned serde documents for spaces, kernels, subspaces and space maps.

use serde::{Deserialize, Serialize};

use crate::algebra::Kernel;
use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};
use crate::space::{DiscreteSpace, SpaceKind, SpaceRef};
use crate::structure::{SpaceMap, Subspace};

pub const KERNEL_SCHEMA: &str = "genmat.kernel/1";
pub const SUBSPACE_SCHEMA: &str = "genmat.subspace/1";
pub const SPACEMAP_SCHEMA: &str = "genmat.spacemap/1";

/// Recipe for a [`DiscreteSpace`].
///
/// `resolution` is required for the continuum kinds; `weights` (and
/// optionally a row-major `metric`, default discrete) for finite spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

impl SpaceDescriptor {
    pub fn build<T: Real>(&self) -> Result<SpaceRef<T>> {
        let need_resolution = || self.resolution.ok_or(Error::ZeroResolution);
        match self.kind {
            SpaceKind::Interval => DiscreteSpace::interval(need_resolution()?),
            SpaceKind::Circle => DiscreteSpace::circle(need_resolution()?),
            SpaceKind::Torus2 => DiscreteSpace::torus2(need_resolution()?),
            SpaceKind::Finite => {
                let w: Vec<T> = self
                    .weights
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("finite space needs weights".into()))?
                    .iter()
                    .map(|&x| T::lit(x))
                    .collect();
                match &self.metric {
                    None => DiscreteSpace::finite_discrete(w),
                    Some(rows) => {
                        let n = w.len();
                        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                            return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
                        }
                        DiscreteSpace::finite(w, rows.iter().flatten().map(|&x| T::lit(x)).collect())
                    }
                }
            }
        }
    }
}

fn hash_hex(h: u64) -> String {
    format!("{h:016x}")
}

fn encode<T: Real>(v: &[C<T>]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()
}

fn decode<T: Real>(v: &[[f64; 2]]) -> Vec<C<T>> {
    v.iter().map(|&[a, b]| c(T::lit(a), T::lit(b))).collect()
}

fn check_schema(found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("schema {found:?}, expected {expected:?}")))
    }
}

fn check_hash<T: Real>(found: &str, space: &SpaceRef<T>) -> Result<()> {
    if found == hash_hex(space.fingerprint()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// Kernel values, row-major as `[re, im]` pairs, tied to a space fingerprint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDoc {
    pub schema: String,
    pub space_hash: String,
    pub n: usize,
    pub values: Vec<[f64; 2]>,
}

impl KernelDoc {
    pub fn from_kernel<T: Real>(f: &Kernel<T>) -> Self {
        Self {
            schema: KERNEL_SCHEMA.into(),
            space_hash: hash_hex(f.space().fingerprint()),
            n: f.n(),
            values: encode(f.values()),
        }
    }

    pub fn to_kernel<T: Real>(&self, space: &SpaceRef<T>) -> Result<Kernel<T>> {
        check_schema(&self.schema, KERNEL_SCHEMA)?;
        check_hash(&self.space_hash, space)?;
        if self.n != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: self.n });
        }
        Kernel::new(space, decode(&self.values))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub schema: String,
    pub space_hash: String,
    pub dim: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
}

impl SubspaceDoc {
    pub fn from_subspace<T: Real>(v: &Subspace<T>) -> Self {
        Self {
            schema: SUBSPACE_SCHEMA.into(),
            space_hash: hash_hex(v.space().fingerprint()),
            dim: v.dim(),
            basis: v.basis().iter().map(|b| encode(b)).collect(),
        }
    }

    pub fn to_subspace<T: Real>(&self, space: &SpaceRef<T>) -> Result<Subspace<T>> {
        check_schema(&self.schema, SUBSPACE_SCHEMA)?;
        check_hash(&self.space_hash, space)?;
        if self.dim != self.basis.len() {
            return Err(Error::DimensionMismatch { expected: self.dim, found: self.basis.len() });
        }
        Subspace::from_orthonormal(space, self.basis.iter().map(|b| decode(b)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceMapDoc {
    pub schema: String,
    pub source_hash: String,
    pub target_hash: String,
    pub map: Vec<usize>,
    pub measure_preserving: bool,
}

impl SpaceMapDoc {
    pub fn from_map<T: Real>(m: &SpaceMap<T>) -> Self {
        Self {
            schema: SPACEMAP_SCHEMA.into(),
            source_hash: hash_hex(m.source().fingerprint()),
            target_hash: hash_hex(m.target().fingerprint()),
            map: m.map().to_vec(),
            measure_preserving: m.measure_preserving(),
        }
    }

    pub fn to_map<T: Real>(&self, source: &SpaceRef<T>, target: &SpaceRef<T>) -> Result<SpaceMap<T>> {
        check_schema(&self.schema, SPACEMAP_SCHEMA)?;
        check_hash(&self.source_hash, source)?;
        check_hash(&self.target_hash, target)?;
        let m = SpaceMap::new(source, target, self.map.clone())?;
        if m.measure_preserving() != self.measure_preserving {
            return Err(Error::InvalidArgument("measure_preserving flag disagrees with the weights".into()));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn descriptor_round_trip() {
        let d: SpaceDescriptor = serde_json::from_str(r#"{"kind":"circle","resolution":8}"#).unwrap();
        let s = d.build::<f64>().unwrap();
        assert_eq!(s.len(), 8);
        let f: SpaceDescriptor =
            serde_json::from_str(r#"{"kind":"finite","weights":[0.5,0.5],"metric":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(f.build::<f64>().unwrap().len(), 2);
        let bad: SpaceDescriptor = serde_json::from_str(r#"{"kind":"torus2"}"#).unwrap();
        assert!(bad.build::<f64>().is_err());
        assert!(serde_json::from_str::<SpaceDescriptor>(r#"{"kind":"sphere","resolution":3}"#).is_err());
    }

    #[test]
    fn kernel_round_trip_is_exact() {
        let s = DiscreteSpace::<f64>::circle(6).unwrap();
        let f = Kernel::random(&s, &mut ChaCha8Rng::seed_from_u64(1));
        let json = serde_json::to_string(&KernelDoc::from_kernel(&f)).unwrap();
        let back: KernelDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_kernel(&s).unwrap().values(), f.values());
        let other = DiscreteSpace::<f64>::interval(6).unwrap();
        assert!(matches!(back.to_kernel(&other), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn subspace_and_map_round_trip() {
        let s = DiscreteSpace::<f64>::finite_discrete(vec![0.2, 0.3, 0.5]).unwrap();
        let v = Subspace::span(&s, &[vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)]]).unwrap();
        let doc = SubspaceDoc::from_subspace(&v);
        let back = doc.to_subspace(&s).unwrap();
        assert_eq!(back.basis(), v.basis());

        let c8 = DiscreteSpace::<f64>::circle(8).unwrap();
        let rot = SpaceMap::new(&c8, &c8, (0..8).map(|i| (i + 1) % 8).collect()).unwrap();
        let doc = SpaceMapDoc::from_map(&rot);
        let json = serde_json::to_string(&doc).unwrap();
        let back: SpaceMapDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_map(&c8, &c8).unwrap().map(), rot.map());
    }
}
