//! Closed 2-orbifolds, spherical type tags and the complexity preorder.
//!
//! Everything here is a pure function on small immutable values. The three
//! spherical types (ordinary, cyclic, vertex) are shared by spherical
//! 2-orbifolds, discal and spherical 3-orbifolds, punctures and sum edges.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Core2dError {
    #[error("cone order {0} is below 2")]
    InvalidOrder(u32),
    #[error("vertex triple ({0},{1},{2}) is not admissible")]
    InadmissibleTriple(u32, u32, u32),
    #[error("boundary component {index} is more complicated than the kept component {keep}")]
    MaximalityViolation { keep: usize, index: usize },
    #[error("kept index {keep} is out of range for a boundary of {len} components")]
    KeepOutOfRange { keep: usize, len: usize },
}

/// Order of a cone point or singular edge; always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConeOrder(u32);

impl ConeOrder {
    pub fn new(value: u32) -> Result<Self, Core2dError> {
        if value < 2 {
            return Err(Core2dError::InvalidOrder(value));
        }
        Ok(ConeOrder(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ConeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sorted admissible vertex triple: `(2,2,p)` or `(2,3,p)` with `p` in 3..=5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexTriple([ConeOrder; 3]);

impl VertexTriple {
    pub fn new(p: u32, q: u32, r: u32) -> Result<Self, Core2dError> {
        let mut orders = [ConeOrder::new(p)?, ConeOrder::new(q)?, ConeOrder::new(r)?];
        orders.sort();
        if !is_admissible_vertex_triple(orders[0], orders[1], orders[2]) {
            return Err(Core2dError::InadmissibleTriple(p, q, r));
        }
        Ok(VertexTriple(orders))
    }

    pub fn orders(&self) -> [ConeOrder; 3] {
        self.0
    }

    pub fn contains(&self, order: ConeOrder) -> bool {
        self.0.contains(&order)
    }
}

impl fmt::Display for VertexTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r] = self.0;
        write!(f, "({p},{q},{r})")
    }
}

/// Returns true iff the sorted triple is `(2,2,p)` or `(2,3,p)` with `p` in 3..=5.
pub fn is_admissible_vertex_triple(p: ConeOrder, q: ConeOrder, r: ConeOrder) -> bool {
    let mut t = [p.get(), q.get(), r.get()];
    t.sort_unstable();
    match t {
        [2, 2, _] => true,
        [2, 3, c] => (3..=5).contains(&c),
        _ => false,
    }
}

/// The type of a spherical 2-orbifold, a discal or spherical 3-orbifold, a
/// puncture, or a connected sum.
///
/// The derived order sorts ordinary before cyclic before vertex, then by
/// orders; it is the order used by every sorted report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SphericalType {
    Ordinary,
    Cyclic(ConeOrder),
    Vertex(VertexTriple),
}

impl SphericalType {
    pub fn cyclic(p: u32) -> Result<Self, Core2dError> {
        Ok(SphericalType::Cyclic(ConeOrder::new(p)?))
    }

    pub fn vertex(p: u32, q: u32, r: u32) -> Result<Self, Core2dError> {
        Ok(SphericalType::Vertex(VertexTriple::new(p, q, r)?))
    }

    /// 0 for ordinary, 1 for cyclic, 2 for vertex. Orders are ignored.
    pub fn complexity_class(&self) -> u8 {
        match self {
            SphericalType::Ordinary => 0,
            SphericalType::Cyclic(_) => 1,
            SphericalType::Vertex(_) => 2,
        }
    }

    pub fn same_class(&self, other: &SphericalType) -> bool {
        self.complexity_class() == other.complexity_class()
    }
}

/// Lower-case tag used in sum labels: `ordinary`, `cyclic(5)`, `vertex(2,3,5)`.
impl fmt::Display for SphericalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphericalType::Ordinary => write!(f, "ordinary"),
            SphericalType::Cyclic(p) => write!(f, "cyclic({p})"),
            SphericalType::Vertex(t) => write!(f, "vertex{t}"),
        }
    }
}

pub fn complexity_class(t: &SphericalType) -> u8 {
    t.complexity_class()
}

/// Closed 2-orbifold with orientable support of the given genus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoOrbifold {
    pub genus: u32,
    pub cone_orders: Vec<ConeOrder>,
}

impl TwoOrbifold {
    pub fn new(genus: u32, cone_orders: Vec<ConeOrder>) -> Self {
        TwoOrbifold { genus, cone_orders }
    }

    /// Convenience constructor from raw integers.
    pub fn from_raw(genus: u32, orders: &[u32]) -> Result<Self, Core2dError> {
        let cone_orders = orders
            .iter()
            .map(|&o| ConeOrder::new(o))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TwoOrbifold { genus, cone_orders })
    }

    /// Orbifold Euler characteristic `(2 - 2g) - sum(1 - 1/p)`, exact.
    pub fn euler_characteristic(&self) -> Ratio<i64> {
        let one = Ratio::from_integer(1);
        let base = Ratio::from_integer(2 - 2 * i64::from(self.genus));
        self.cone_orders.iter().fold(base, |acc, p| {
            acc - (one - Ratio::new(1, i64::from(p.get())))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Bad,
    Spherical(SphericalType),
    Euclidean,
    Hyperbolic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Bad => write!(f, "bad"),
            Classification::Spherical(t) => write!(f, "spherical {t}"),
            Classification::Euclidean => write!(f, "euclidean"),
            Classification::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

/// Classifies a closed orientable 2-orbifold as bad, one of the three
/// spherical types, Euclidean, or hyperbolic.
pub fn classify_two_orbifold(s: &TwoOrbifold) -> Classification {
    if s.genus == 0 {
        let mut orders = s.cone_orders.clone();
        orders.sort();
        match orders.as_slice() {
            [] => return Classification::Spherical(SphericalType::Ordinary),
            [_] => return Classification::Bad,
            [p, q] if p != q => return Classification::Bad,
            [p, _] => return Classification::Spherical(SphericalType::Cyclic(*p)),
            [p, q, r] if is_admissible_vertex_triple(*p, *q, *r) => {
                return Classification::Spherical(SphericalType::Vertex(VertexTriple([*p, *q, *r])))
            }
            _ => {}
        }
    }
    let chi = s.euler_characteristic();
    let zero = Ratio::from_integer(0);
    if chi == zero {
        Classification::Euclidean
    } else if chi < zero {
        Classification::Hyperbolic
    } else {
        // Every good orientable 2-orbifold with positive Euler
        // characteristic is one of the spherical cases above.
        unreachable!("positive Euler characteristic outside the spherical list: {s:?}")
    }
}

/// Type of the discal 3-orbifold obtained by capping every boundary
/// component of a punctured discal 3-orbifold except `boundary[keep]`.
pub fn cap_punctured_discal(
    boundary: &[SphericalType],
    keep: usize,
) -> Result<SphericalType, Core2dError> {
    let kept = *boundary.get(keep).ok_or(Core2dError::KeepOutOfRange {
        keep,
        len: boundary.len(),
    })?;
    if let Some(index) = boundary
        .iter()
        .position(|t| t.complexity_class() > kept.complexity_class())
    {
        return Err(Core2dError::MaximalityViolation { keep, index });
    }
    Ok(kept)
}

/// A spherical 3-orbifold punctured once is discal iff the puncture has
/// exactly the type of the orbifold, orders included.
pub fn punctured_spherical_is_discal(
    orbifold_type: SphericalType,
    puncture_type: SphericalType,
) -> bool {
    orbifold_type == puncture_type
}
