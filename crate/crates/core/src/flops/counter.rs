use std::ops::AddAssign;

/// Tally of floating-point operations by kind.
///
/// A square root counts as one operation. Sign changes, comparisons and
/// data movement are free.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FlopCounter {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub divs: u64,
    pub sqrts: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.adds + self.subs + self.muls + self.divs + self.sqrts
    }

    #[inline]
    pub fn add(&mut self, n: usize) {
        self.adds += n as u64;
    }

    #[inline]
    pub fn sub(&mut self, n: usize) {
        self.subs += n as u64;
    }

    #[inline]
    pub fn mul(&mut self, n: usize) {
        self.muls += n as u64;
    }

    #[inline]
    pub fn div(&mut self, n: usize) {
        self.divs += n as u64;
    }

    #[inline]
    pub fn sqrt(&mut self, n: usize) {
        self.sqrts += n as u64;
    }

    /// Dot product of length `n`: `n` products and `n − 1` sums.
    #[inline]
    pub(crate) fn dot(&mut self, n: usize) {
        if n > 0 {
            self.mul(n);
            self.add(n - 1);
        }
    }
}

impl AddAssign for FlopCounter {
    fn add_assign(&mut self, o: Self) {
        self.adds += o.adds;
        self.subs += o.subs;
        self.muls += o.muls;
        self.divs += o.divs;
        self.sqrts += o.sqrts;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_sums_fields() {
        let mut c = FlopCounter::new();
        c.add(1);
        c.sub(2);
        c.mul(3);
        c.div(4);
        c.sqrt(5);
        c.dot(3);
        assert_eq!(c.total(), 15 + 5);
        let mut d = c;
        d += c;
        assert_eq!(d.total(), 40);
    }
}
