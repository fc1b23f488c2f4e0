use std::sync::Arc;

use crate::bitcore::BitString;
use crate::error::{Error, Result};
use crate::streams::{
    is_prefix_of_source, representation_of, BitSource, Halt, Machine, RealFunction,
    Representation,
};

/// Widest tree level explored before giving up on consensus.
pub const DEFAULT_WIDTH_CAP: usize = 1 << 12;

fn common_prefix(level: &[BitString]) -> usize {
    let first = &level[0];
    level[1..]
        .iter()
        .map(|s| first.common_prefix_len(s))
        .min()
        .unwrap_or(first.len())
}

fn children(level: &[BitString], mut keep: impl FnMut(&BitString) -> bool) -> Vec<BitString> {
    level
        .iter()
        .flat_map(|s| [s.child(false), s.child(true)])
        .filter(|c| keep(c))
        .collect()
}

/// The first `n` bits of the unique preimage of `y`, found by walking the
/// levels of `T_y = {σ : f̂(σ) ≺ y}` until every surviving node agrees on `n`
/// bits.
pub fn unique_path_invert(
    rep: &Representation,
    y: &BitSource,
    n: usize,
    depth_cap: usize,
) -> Result<BitString> {
    let mut level = vec![BitString::new()];
    level.retain(|s| is_prefix_of_source(&rep.image(s), y));
    for depth in 0..=depth_cap {
        if level.is_empty() {
            return Err(Error::NotInRange { depth });
        }
        if depth >= n && common_prefix(&level) >= n {
            return Ok(level[0].prefix(n));
        }
        if depth == depth_cap || level.len() > DEFAULT_WIDTH_CAP {
            return Err(Error::NotSingleton { depth });
        }
        level = children(&level, |c| is_prefix_of_source(&rep.image(c), y));
    }
    unreachable!("the loop returns at depth_cap")
}

/// The unique-path inverter as a machine: reads `y` from its tape and emits
/// preimage bits as the surviving level reaches consensus on them.
#[derive(Debug, Clone)]
pub struct TreeInverter {
    f: Arc<dyn RealFunction>,
    depth_cap: usize,
}

impl TreeInverter {
    pub fn new(f: Arc<dyn RealFunction>, depth_cap: usize) -> Self {
        Self { f, depth_cap }
    }
}

impl RealFunction for TreeInverter {
    fn name(&self) -> String {
        format!("tree-inverse({})", self.f.name())
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        let rep = representation_of(self.f.clone(), self.depth_cap);
        let mut level = vec![BitString::new()];
        let mut depth = 0;
        loop {
            let mut survivors = Vec::with_capacity(level.len());
            for s in level {
                m.tick(1)?;
                let img = rep.image(&s);
                let mut ok = true;
                for (i, b) in img.iter().enumerate() {
                    if m.read(i as u64)? != b {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    survivors.push(s);
                }
            }
            level = survivors;
            if level.is_empty() {
                return Err(Error::NotInRange { depth }.into());
            }
            let agreed = common_prefix(&level);
            while m.position() < agreed && !m.done() {
                let b = level[0].get(m.position()).expect("inside the agreed prefix");
                m.emit(b);
            }
            if m.done() {
                return Ok(());
            }
            if depth == self.depth_cap || level.len() > DEFAULT_WIDTH_CAP {
                return Err(Error::NotSingleton { depth }.into());
            }
            level = level
                .iter()
                .flat_map(|s| [s.child(false), s.child(true)])
                .collect();
            depth += 1;
        }
    }
}
