//! Seeded random generation of group elements, scalars and algebra elements.
//!
//! Every sampler is a ChaCha8 stream keyed by `(seed, stream)`: the seed comes
//! from the run configuration and the stream id separates independent
//! batches, so results never depend on the order batches run in.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, Symbol, Tag};
use crate::foundations::{AdditiveMap, Character, FieldMode, GroupElement, GroupInstance, GroupKind, Scalar};

/// Identifier recorded in reports so that witnesses can be regenerated.
pub const RNG_ALGORITHM: &str = "chacha8-stream-v1";

/// Default bound on lattice coordinates of sampled group elements.
pub const DEFAULT_RADIUS: i64 = 3;

/// Default maximum support of sampled algebra elements.
pub const DEFAULT_SUPPORT: usize = 4;

pub struct Sampler {
    rng: ChaCha8Rng,
    radius: i64,
    support: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler {
            rng,
            radius: DEFAULT_RADIUS,
            support: DEFAULT_SUPPORT,
        }
    }

    pub fn with_radius(mut self, radius: i64) -> Self {
        self.radius = radius.max(1);
        self
    }

    pub fn with_support(mut self, support: usize) -> Self {
        self.support = support.max(1);
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn group_element(&mut self, g: &GroupInstance) -> GroupElement {
        let r = self.radius;
        match g.kind() {
            GroupKind::Q => {
                let den = self.rng.gen_range(1..=2i64);
                let num = self.rng.gen_range(-r * den..=r * den);
                GroupElement::Rational(BigRational::new(num.into(), den.into()))
            }
            k => GroupElement::Lattice((0..k.rank()).map(|_| self.rng.gen_range(-r..=r)).collect()),
        }
    }

    pub fn nonzero_group_element(&mut self, g: &GroupInstance) -> GroupElement {
        loop {
            let x = self.group_element(g);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// A coefficient from `{±1, ±2, ±1/2, ±1/3}`.
    pub fn coefficient(&mut self) -> Scalar {
        const CHOICES: [(i64, i64); 4] = [(1, 1), (2, 1), (1, 2), (1, 3)];
        let (n, d) = *CHOICES.choose(&mut self.rng).expect("nonempty");
        let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
        Scalar::from_ratio(sign * n, d)
    }

    /// A field element; in quadratic mode half of the draws carry a surd part.
    pub fn field_scalar(&mut self, g: &GroupInstance) -> Scalar {
        let base = self.coefficient();
        match g.field() {
            FieldMode::Quadratic(d) if self.rng.gen_bool(0.5) => {
                let surd = self.coefficient();
                let root = Scalar::sqrt_of(d).expect("validated field");
                base + surd * root
            }
            _ => base,
        }
    }

    pub fn nonzero_field_scalar(&mut self, g: &GroupInstance) -> Scalar {
        loop {
            let s = self.field_scalar(g);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn symbol(&mut self, g: &GroupInstance, tag: Tag) -> Symbol {
        let x = self.group_element(g);
        match tag {
            Tag::W => Symbol::L(x),
            Tag::D => Symbol::D(x, self.rng.gen_range(0..=3)),
            Tag::D1 => {
                if self.rng.gen_bool(0.5) {
                    Symbol::L(x)
                } else {
                    Symbol::I(x)
                }
            }
            Tag::HV => match self.rng.gen_range(0..10) {
                0 => Symbol::CL,
                1 => Symbol::CI,
                2 => Symbol::CLI,
                3..=6 => Symbol::L(x),
                _ => Symbol::I(x),
            },
        }
    }

    /// A random element with between one and `support` terms (fewer when
    /// terms collide).
    pub fn element(&mut self, g: &GroupInstance, tag: Tag) -> Element {
        let n = self.rng.gen_range(1..=self.support);
        let mut e = Element::zero(tag);
        for _ in 0..n {
            let s = self.symbol(g, tag);
            let c = self.coefficient();
            e.push(s, c).expect("sampled symbols are admissible");
        }
        e
    }

    pub fn character(&mut self, g: &GroupInstance) -> Character {
        if g.kind() == GroupKind::Q {
            return Character::trivial(g);
        }
        let images = (0..g.rank()).map(|_| self.nonzero_field_scalar(g)).collect();
        Character::new(g, images).expect("nonzero images")
    }

    pub fn additive_map(&mut self, g: &GroupInstance) -> AdditiveMap {
        let images = (0..g.rank()).map(|_| self.field_scalar(g)).collect();
        AdditiveMap::new(g, images).expect("arity matches")
    }

    /// An element of the scaling set: `±1` on lattices, a nonzero rational on `Q`.
    pub fn scaling(&mut self, g: &GroupInstance) -> Scalar {
        let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
        match g.kind() {
            GroupKind::Q => {
                let num = self.rng.gen_range(1..=3i64);
                let den = self.rng.gen_range(1..=3i64);
                Scalar::from_ratio(sign * num, den)
            }
            _ => Scalar::from_int(sign),
        }
    }
}
