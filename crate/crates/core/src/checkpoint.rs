//! Binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "CCKP" version:u32 n:u32 sharing:u8 seed:u64 iteration:u64 env_steps:u64
//! obs_dim:u32 act_dim:u32 hidden:u32
//! optimizers:u32 { step:u64 lr:f32 beta1:f32 beta2:f32 eps:f32 }*
//! tensors:u32 { name_len:u16 name ndims:u8 dims:u32* }*
//! payloads: f32 per element, tensors in table order
//! ```
//!
//! Network tensors come first, then Adam first and second moments named
//! `adam.{learner}.{m|v}.{k}`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::{Adam, AdamConfig};
use crate::ppo::{PolicySet, SharingConfig};

const MAGIC: &[u8; 4] = b"CCKP";
pub const FORMAT_VERSION: u32 = 1;

/// Network parameters plus the optimizer state needed to resume training.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub policy: PolicySet,
    /// One per learner, in [`PolicySet::learners`] order.
    pub optimizers: Vec<Adam>,
    pub iteration: u64,
    pub env_steps: u64,
    pub seed: u64,
}

impl Checkpoint {
    /// Parameters only, with empty optimizer state.
    pub fn from_policy(policy: PolicySet) -> Self {
        Checkpoint { policy, optimizers: Vec::new(), iteration: 0, env_steps: 0, seed: 0 }
    }

    fn tensor_table(&self) -> Vec<(String, Vec<u32>, &[f32])> {
        let mut t = self.policy.named_tensors();
        for (li, opt) in self.optimizers.iter().enumerate() {
            for (which, bufs) in [("m", &opt.m), ("v", &opt.v)] {
                for (k, b) in bufs.iter().enumerate() {
                    t.push((format!("adam.{li}.{which}.{k}"), vec![b.len() as u32], &b[..]));
                }
            }
        }
        t
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        b.extend_from_slice(&self.policy.n.to_le_bytes());
        b.push(self.policy.sharing.code());
        for x in [self.seed, self.iteration, self.env_steps] {
            b.extend_from_slice(&x.to_le_bytes());
        }
        for d in [self.policy.obs_dim(), self.policy.act_dim(), self.policy.hidden()] {
            b.extend_from_slice(&(d as u32).to_le_bytes());
        }
        b.extend_from_slice(&(self.optimizers.len() as u32).to_le_bytes());
        for o in &self.optimizers {
            b.extend_from_slice(&o.step.to_le_bytes());
            for x in [o.config.lr, o.config.beta1, o.config.beta2, o.config.eps] {
                b.extend_from_slice(&x.to_le_bytes());
            }
        }
        let table = self.tensor_table();
        b.extend_from_slice(&(table.len() as u32).to_le_bytes());
        for (name, dims, _) in &table {
            b.extend_from_slice(&(name.len() as u16).to_le_bytes());
            b.extend_from_slice(name.as_bytes());
            b.push(dims.len() as u8);
            for d in dims {
                b.extend_from_slice(&d.to_le_bytes());
            }
        }
        for (_, _, data) in &table {
            for x in data.iter() {
                b.extend_from_slice(&x.to_le_bytes());
            }
        }
        b
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { b: bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Format("not a checkpoint (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {version}")));
        }
        let n = r.u32()?;
        let sharing = SharingConfig::from_code(r.u8()?)?;
        let (seed, iteration, env_steps) = (r.u64()?, r.u64()?, r.u64()?);
        let (obs_dim, act_dim, hidden) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
        if obs_dim == 0 || act_dim == 0 || hidden == 0 {
            return Err(Error::Format("zero network dimension".into()));
        }
        // refuse to allocate more than the payload could possibly fill
        if PolicySet::count_for(obs_dim, act_dim, hidden, sharing) * 4 > bytes.len() as u128 {
            return Err(Error::Format("declared network larger than the file".into()));
        }
        let n_opt = r.u32()? as usize;
        let mut opt_headers = Vec::with_capacity(n_opt.min(64));
        for _ in 0..n_opt {
            let step = r.u64()?;
            let config = AdamConfig { lr: r.f32()?, beta1: r.f32()?, beta2: r.f32()?, eps: r.f32()? };
            opt_headers.push((step, config));
        }

        let policy = PolicySet::zeros(n, obs_dim, act_dim, hidden, sharing);
        let learners = policy.learners();
        let mut optimizers: Vec<Adam> = Vec::new();
        if n_opt > 0 {
            if n_opt != learners.len() {
                return Err(Error::Format(format!(
                    "{n_opt} optimizer states for {} learners",
                    learners.len()
                )));
            }
            let sizes: Vec<usize> = policy.tensors().iter().map(|t| t.len()).collect();
            for ((step, config), l) in opt_headers.into_iter().zip(&learners) {
                let mut a = Adam::new(config, &l.tensors.iter().map(|&k| sizes[k]).collect::<Vec<_>>());
                a.step = step;
                optimizers.push(a);
            }
        }
        let mut ck = Checkpoint { policy, optimizers, iteration, env_steps, seed };

        // the table must match the one implied by the header exactly
        let expected: Vec<(String, Vec<u32>)> =
            ck.tensor_table().into_iter().map(|(n, d, _)| (n, d)).collect();
        let count = r.u32()? as usize;
        if count != expected.len() {
            return Err(Error::Format(format!("{count} tensors, expected {}", expected.len())));
        }
        for (name, dims) in &expected {
            let len = r.u16()? as usize;
            let got = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::Format("tensor name is not UTF-8".into()))?;
            let nd = r.u8()? as usize;
            let mut got_dims = Vec::with_capacity(nd);
            for _ in 0..nd {
                got_dims.push(r.u32()?);
            }
            if got != name || &got_dims != dims {
                return Err(Error::Format(format!(
                    "tensor '{got}' {got_dims:?} where '{name}' {dims:?} was expected"
                )));
            }
        }
        let mut targets: Vec<&mut [f32]> = ck.policy.tensors_mut();
        for o in ck.optimizers.iter_mut() {
            let Adam { m, v, .. } = o;
            targets.extend(m.iter_mut().map(|x| &mut x[..]));
            targets.extend(v.iter_mut().map(|x| &mut x[..]));
        }
        for t in targets {
            for x in t.iter_mut() {
                *x = r.f32()?;
            }
        }
        if r.pos != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(ck)
    }

    /// Writes through a temporary file so an interrupted save never leaves a
    /// truncated checkpoint behind.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_bytes())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)
            .map_err(|e| Error::Config(format!("cannot read checkpoint {}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.pos + k > self.b.len() {
            return Err(Error::Format(format!("checkpoint truncated at byte {}", self.pos)));
        }
        let s = &self.b[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn arr<const K: usize>(&mut self) -> Result<[u8; K]> {
        Ok(self.take(K)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.arr()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.arr()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.arr()?))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.arr()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppo::{TrainConfig, Trainer, PpoConfig};
    use crate::seeding;

    #[test]
    fn roundtrip_is_byte_exact() {
        for sharing in SharingConfig::ALL {
            let p = PolicySet::with_dims(2, 30, 17, 5, sharing, &mut seeding::rng(1, 2));
            let mut ck = Checkpoint::from_policy(p);
            ck.iteration = 7;
            let bytes = ck.to_bytes();
            let back = Checkpoint::from_bytes(&bytes).unwrap();
            assert_eq!(back, ck);
            assert_eq!(back.to_bytes(), bytes);
        }
    }

    #[test]
    fn optimizer_state_survives() {
        let cfg = TrainConfig {
            n: 1,
            sharing: SharingConfig::FullyIndependent,
            num_envs: 1,
            turn_limit: 20,
            ppo: PpoConfig { steps_per_iteration: 64, minibatch_size: 32, epochs: 1, ..Default::default() },
            ..Default::default()
        };
        let mut t = Trainer::new(cfg).unwrap();
        t.iterate().unwrap();
        let ck = t.checkpoint();
        assert!(ck.optimizers.iter().any(|o| o.step > 0));
        let bytes = ck.to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn corruption_is_detected() {
        let p = PolicySet::with_dims(1, 8, 5, 3, SharingConfig::FullyShared, &mut seeding::rng(0, 0));
        let bytes = Checkpoint::from_policy(p).to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(Checkpoint::from_bytes(&magic).is_err());
        let mut version = bytes;
        version[4] = 9;
        assert!(matches!(Checkpoint::from_bytes(&version), Err(Error::Format(_))));
    }
}
