use std::sync::Arc;

use super::{BitSource, Halt, Machine, RealFunction};

/// `x ↦ x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl RealFunction for Identity {
    fn name(&self) -> String {
        "identity".into()
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        while !m.done() {
            let b = m.read(m.position() as u64)?;
            m.emit(b);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some(m.read(n as u64))
    }
}

/// A constant function; never reads its input.
#[derive(Debug, Clone)]
pub struct Constant(pub BitSource);

impl RealFunction for Constant {
    fn name(&self) -> String {
        format!("constant({})", self.0)
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        while !m.done() {
            m.tick(1)?;
            m.emit(self.0.bit(m.position() as u64));
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some(m.tick(1).map(|_| self.0.bit(n as u64)))
    }
}

/// `x ↦ 0x`, an injection that is not onto.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShiftRight;

impl RealFunction for ShiftRight {
    fn name(&self) -> String {
        "shift-right".into()
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        while !m.done() {
            let i = m.position() as u64;
            let b = if i == 0 { false } else { m.read(i - 1)? };
            m.emit(b);
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        Some(if n == 0 { Ok(false) } else { m.read(n as u64 - 1) })
    }
}

/// `x ↦ f(x) ⊕ g(x)`.
#[derive(Debug, Clone)]
pub struct InterleaveOutputs {
    pub even: Arc<dyn RealFunction>,
    pub odd: Arc<dyn RealFunction>,
}

impl InterleaveOutputs {
    pub fn new(even: Arc<dyn RealFunction>, odd: Arc<dyn RealFunction>) -> Self {
        Self { even, odd }
    }
}

impl RealFunction for InterleaveOutputs {
    fn name(&self) -> String {
        format!("({})⊕({})", self.even.name(), self.odd.name())
    }

    fn run(&self, m: &mut Machine<'_>) -> Result<(), Halt> {
        let start = m.position();
        let target = m.target();
        let need_even = target.div_ceil(2);
        let need_odd = target / 2;
        let (a, ha) = m.subrun(self.even.as_ref(), need_even);
        let (b, hb) = m.subrun(self.odd.as_ref(), need_odd);
        // a sequential machine stops at whichever component fails first
        for i in start..target {
            let bit = if i % 2 == 0 { a.get(i / 2) } else { b.get(i / 2) };
            match bit {
                Some(bit) => m.emit(bit),
                None => {
                    let halt = if i % 2 == 0 { ha } else { hb };
                    return Err(halt.unwrap_or(Halt::Budget));
                }
            }
        }
        Ok(())
    }

    fn bit_at(&self, m: &mut Machine<'_>, n: usize) -> Option<Result<bool, Halt>> {
        if n.is_multiple_of(2) {
            self.even.bit_at(m, n / 2)
        } else {
            self.odd.bit_at(m, n / 2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::BitString;
    use crate::streams::{evaluate, TapeInput};

    fn w(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn identity_on_zeros() {
        let e = evaluate(&Identity, &BitSource::zeros(), 4).unwrap();
        assert_eq!(e.bits, w("0000"));
        assert_eq!(e.used, 4);
    }

    #[test]
    fn interleaved_outputs_take_even_and_odd() {
        let f = InterleaveOutputs::new(Arc::new(Identity), Arc::new(Constant(BitSource::ones())));
        let x = BitSource::finite(w("0110"));
        let e = evaluate(&f, &x, 8).unwrap();
        assert_eq!(e.bits, w("01111101"));
        assert_eq!(e.used, 4);
    }

    #[test]
    fn interleave_truncates_at_first_missing_bit() {
        let f = InterleaveOutputs::new(Arc::new(Identity), Arc::new(Constant(BitSource::zeros())));
        let word = w("11");
        let r = crate::streams::run(&f, TapeInput::Word(&word), 10, 100);
        assert_eq!(r.bits, w("1010"));
        assert_eq!(r.halt, Some(Halt::NeedBit(2)));
    }

    #[test]
    fn shift_right_prepends_zero() {
        let e = evaluate(&ShiftRight, &BitSource::ones(), 4).unwrap();
        assert_eq!(e.bits, w("0111"));
        assert_eq!(e.used, 3);
    }

    #[test]
    fn direct_bits_agree_with_sequential_runs() {
        let x = BitSource::finite(w("0110"));
        let fs: Vec<Box<dyn RealFunction>> = vec![
            Box::new(Identity),
            Box::new(ShiftRight),
            Box::new(Constant(BitSource::periodic(w("01")).unwrap())),
            Box::new(InterleaveOutputs::new(Arc::new(ShiftRight), Arc::new(Identity))),
        ];
        for f in &fs {
            let seq = evaluate(f.as_ref(), &x, 12).unwrap().bits;
            for n in 0..12 {
                let r = crate::streams::run_bit(f.as_ref(), TapeInput::Source(&x), n, 100);
                assert_eq!(r.bit, seq.get(n), "{} bit {n}", f.name());
            }
        }
    }
}
