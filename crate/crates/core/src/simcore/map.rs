use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::perm::SignedPermutation;
use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;

/// `x -> ratio * O x + t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityMap {
    pub ratio: ExactScalar,
    pub orth: SignedPermutation,
    pub t: Vec<ExactScalar>,
}

impl SimilarityMap {
    /// A contraction; the ratio must lie in `(0, 1)`.
    pub fn new(ratio: ExactScalar, orth: SignedPermutation, t: Vec<ExactScalar>) -> Result<Self> {
        if orth.dim() != t.len() {
            return Err(Error::DimensionMismatch(orth.dim(), t.len()));
        }
        if ratio.sign() <= 0 || ratio.cmp_exact(&ExactScalar::one()) != Ordering::Less {
            return Err(Error::InvalidInput(format!("ratio {ratio} is not in (0, 1)")));
        }
        Ok(SimilarityMap { ratio, orth, t })
    }

    /// One-dimensional `x -> r x + t`.
    pub fn affine(ratio: ExactScalar, t: ExactScalar) -> Result<Self> {
        Self::new(ratio, SignedPermutation::identity(1), vec![t])
    }

    /// The identity; only valid as an intermediate value (ratio 1).
    pub fn identity(d: usize) -> Self {
        SimilarityMap { ratio: ExactScalar::one(), orth: SignedPermutation::identity(d), t: vec![ExactScalar::zero(); d] }
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn apply(&self, x: &[ExactScalar]) -> Vec<ExactScalar> {
        let ox = self.orth.apply(x);
        ox.iter().zip(&self.t).map(|(a, b)| &(&self.ratio * a) + b).collect()
    }
}

/// `f o g`.
pub fn compose(f: &SimilarityMap, g: &SimilarityMap) -> Result<SimilarityMap> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let ot = f.orth.apply(&g.t);
    let t = ot.iter().zip(&f.t).map(|(a, b)| &(&f.ratio * a) + b).collect();
    Ok(SimilarityMap { ratio: &f.ratio * &g.ratio, orth: f.orth.compose(&g.orth), t })
}

/// Finite labelled collection of contracting similarities on `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IFSInstance {
    dim: usize,
    maps: Vec<(String, SimilarityMap)>,
}

impl IFSInstance {
    pub fn new(dim: usize, maps: Vec<(String, SimilarityMap)>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidInput("an IFS needs at least two maps".into()));
        }
        let mut seen = HashMap::new();
        for (i, (label, m)) in maps.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(dim, m.dim()));
            }
            if seen.insert(label.as_str(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate label `{label}`")));
            }
        }
        Ok(IFSInstance { dim, maps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[(String, SimilarityMap)] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &SimilarityMap {
        &self.maps[i].1
    }

    pub fn label(&self, i: usize) -> &str {
        &self.maps[i].0
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.maps.iter().position(|(l, _)| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn labels_of(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.maps[i].0.clone()).collect()
    }

    pub fn indices_of(&self, w: &[String]) -> Result<Vec<usize>> {
        w.iter().map(|l| self.index_of(l)).collect()
    }

    /// Labelled union; fails on a repeated label.
    pub fn union(&self, other: &IFSInstance) -> Result<IFSInstance> {
        let mut maps = self.maps.clone();
        maps.extend(other.maps.iter().cloned());
        IFSInstance::new(self.dim, maps)
    }
}

/// `phi_{w_1} o ... o phi_{w_n}`; the empty word gives the identity.
pub fn compose_word(ifs: &IFSInstance, w: &[String]) -> Result<SimilarityMap> {
    let idx = ifs.indices_of(w)?;
    Ok(compose_indices(ifs, &idx))
}

pub fn compose_indices(ifs: &IFSInstance, w: &[usize]) -> SimilarityMap {
    // balanced splitting keeps operand sizes even; a left-to-right chain is
    // quadratic in the word length once the coefficients grow
    match w {
        [] => SimilarityMap::identity(ifs.dim()),
        [i] => ifs.map(*i).clone(),
        _ => {
            let (a, b) = w.split_at(w.len() / 2);
            compose(&compose_indices(ifs, a), &compose_indices(ifs, b)).expect("dimensions agree")
        }
    }
}

/// Distance that is infinite unless ratio and orthogonal part agree, and the
/// sup-norm of the translation difference otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictDistance {
    Infinite,
    Finite(ExactScalar),
}

impl StrictDistance {
    pub fn is_zero(&self) -> bool {
        matches!(self, StrictDistance::Finite(v) if v.is_zero())
    }

    pub fn value(&self) -> Option<&ExactScalar> {
        match self {
            StrictDistance::Finite(v) => Some(v),
            StrictDistance::Infinite => None,
        }
    }
}

impl PartialOrd for StrictDistance {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for StrictDistance {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (StrictDistance::Infinite, StrictDistance::Infinite) => Ordering::Equal,
            (StrictDistance::Infinite, _) => Ordering::Greater,
            (_, StrictDistance::Infinite) => Ordering::Less,
            (StrictDistance::Finite(a), StrictDistance::Finite(b)) => a.cmp_exact(b),
        }
    }
}

impl fmt::Display for StrictDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrictDistance::Infinite => write!(f, "inf"),
            StrictDistance::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Largest absolute coordinate.
pub fn sup_norm(v: &[ExactScalar]) -> ExactScalar {
    v.iter().map(|x| x.abs()).fold(ExactScalar::zero(), |a, b| a.max_exact(b))
}

pub fn dist_strict(f: &SimilarityMap, g: &SimilarityMap) -> StrictDistance {
    if f.orth != g.orth || f.ratio.cmp_exact(&g.ratio) != Ordering::Equal {
        return StrictDistance::Infinite;
    }
    let diff: Vec<ExactScalar> = f.t.iter().zip(&g.t).map(|(a, b)| a - b).collect();
    StrictDistance::Finite(sup_norm(&diff))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapRepr {
    label: String,
    ratio: ExactScalar,
    perm: Vec<usize>,
    signs: Vec<i8>,
    t: Vec<ExactScalar>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsRepr {
    dim: usize,
    maps: Vec<MapRepr>,
}

impl Serialize for IFSInstance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IfsRepr {
            dim: self.dim,
            maps: self
                .maps
                .iter()
                .map(|(l, m)| MapRepr {
                    label: l.clone(),
                    ratio: m.ratio.clone(),
                    perm: m.orth.perm().to_vec(),
                    signs: m.orth.signs().to_vec(),
                    t: m.t.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IFSInstance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = IfsRepr::deserialize(d)?;
        let maps = r
            .maps
            .into_iter()
            .map(|m| {
                let o = SignedPermutation::new(m.perm, m.signs)?;
                Ok((m.label, SimilarityMap::new(m.ratio, o, m.t)?))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        IFSInstance::new(r.dim, maps).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};
    use crate::exactnum::{isolate_real_roots, IntPolynomial, RatInterval};

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from(rat(n, d))
    }

    fn ifs2(r: ExactScalar, t0: ExactScalar, t1: ExactScalar) -> IFSInstance {
        IFSInstance::new(
            1,
            vec![
                ("A".into(), SimilarityMap::affine(r.clone(), t0).unwrap()),
                ("B".into(), SimilarityMap::affine(r, t1).unwrap()),
            ],
        )
        .unwrap()
    }

    fn w(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn compose_examples() {
        let f = SimilarityMap::affine(q(1, 2), q(0, 1)).unwrap();
        let g = SimilarityMap::affine(q(1, 2), q(1, 2)).unwrap();
        let fg = compose(&f, &g).unwrap();
        assert_eq!(fg.ratio, q(1, 4));
        assert_eq!(fg.t[0], q(1, 4));
        // u(x+1) o u(x+2) at u = 3/5
        let u = q(3, 5);
        let f = SimilarityMap::affine(u.clone(), u.clone()).unwrap();
        let g = SimilarityMap::affine(u.clone(), &u * &q(2, 1)).unwrap();
        let fg = compose(&f, &g).unwrap();
        assert_eq!(fg.ratio, q(9, 25));
        assert_eq!(fg.t[0], q(33, 25));
    }

    #[test]
    fn compose_word_examples() {
        let ifs = ifs2(q(1, 2), q(0, 1), q(1, 2));
        let m = compose_word(&ifs, &w("AB")).unwrap();
        assert_eq!((m.ratio.clone(), m.t[0].clone()), (q(1, 4), q(1, 4)));
        let id = compose_word(&ifs, &[]).unwrap();
        assert_eq!(id.ratio, ExactScalar::one());
        let ifs = ifs2(q(1, 3), q(0, 1), q(1, 3));
        let m = compose_word(&ifs, &w("BBB")).unwrap();
        assert_eq!((m.ratio, m.t[0].clone()), (q(1, 27), q(13, 27)));
        assert!(matches!(compose_word(&ifs, &w("C")), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn strict_distance_examples() {
        let a = SimilarityMap::affine(q(1, 2), q(0, 1)).unwrap();
        let b = SimilarityMap::affine(q(1, 3), q(0, 1)).unwrap();
        assert_eq!(dist_strict(&a, &b), StrictDistance::Infinite);
        let c = SimilarityMap::affine(q(1, 2), q(1, 1)).unwrap();
        assert_eq!(dist_strict(&c, &a), StrictDistance::Finite(q(1, 1)));

        let p = IntPolynomial::from_i64(&[-1, 1, 1]);
        let g = ExactScalar::from_algebraic(
            isolate_real_roots(&p, &RatInterval::new(rat(1, 2), int(1))).unwrap().remove(0),
        );
        let ifs = ifs2(g.clone(), g.clone(), &g * &q(2, 1));
        let ab = compose_word(&ifs, &w("AA")).unwrap();
        let ba = compose_word(&ifs, &w("BA")).unwrap();
        // t(AA) = g + g^2, t(BA) = 2g + g^2, so the distance is g
        assert_eq!(dist_strict(&ab, &ba), StrictDistance::Finite(g.clone()));
        let x = compose_word(&ifs, &w("ABB")).unwrap();
        let y = compose_word(&ifs, &w("BAA")).unwrap();
        assert!(dist_strict(&x, &y).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let ifs = ifs2(q(1, 3), q(0, 1), q(2, 3));
        let s = serde_json::to_string(&ifs).unwrap();
        assert!(s.contains("\"perm\":[0]"));
        let back: IFSInstance = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ifs);
        let bad = s.replace("\"1/3\"", "\"3/2\"");
        assert!(serde_json::from_str::<IFSInstance>(&bad).is_err());
    }

    #[test]
    fn rejects_bad_instances() {
        let m = SimilarityMap::affine(q(1, 2), q(0, 1)).unwrap();
        assert!(IFSInstance::new(1, vec![("A".into(), m.clone())]).is_err());
        assert!(IFSInstance::new(1, vec![("A".into(), m.clone()), ("A".into(), m)]).is_err());
        assert!(SimilarityMap::affine(q(1, 1), q(0, 1)).is_err());
    }
}
