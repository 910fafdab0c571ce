use std::fmt;

use crate::monk::{block_colours, Block, MonkAtom, MonkFamily, MonkParams};
use crate::{Error, Result};

/// An ultrafilter of the Monk term algebra: principal at an atom, or the
/// non-principal one living on a block `E^W` (sets meeting `E^W` in
/// infinitely many atoms).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UfLabel {
    Principal(MonkAtom),
    Block(Block),
}

impl UfLabel {
    pub const ID: UfLabel = UfLabel::Principal(MonkAtom::Id);

    pub fn is_id(&self) -> bool {
        *self == Self::ID
    }
}

impl fmt::Display for UfLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UfLabel::Principal(MonkAtom::Id) => write!(f, "U^Id"),
            UfLabel::Principal(MonkAtom::Coloured { index, colour, block, copy }) => {
                write!(f, "U^a{index}.{colour}.{}", join(*block))?;
                if *copy > 0 {
                    write!(f, ".{copy}")?;
                }
                Ok(())
            }
            UfLabel::Block(w) => write!(f, "U^W{}", join(*w)),
        }
    }
}

fn join(w: Block) -> String {
    block_colours(w).iter().map(|c| c.to_string()).collect::<Vec<_>>().join("-")
}

/// Triple consistency over one family, with the family's parameters
/// checked once.
#[derive(Debug, Clone)]
pub(crate) struct UfCalculus {
    pub(crate) params: MonkParams,
    pub(crate) blocks: Vec<Block>,
}

impl UfCalculus {
    pub(crate) fn new(p: &MonkParams) -> Result<Self> {
        let fam = MonkFamily::new(*p)?;
        Ok(UfCalculus { params: *p, blocks: fam.blocks().to_vec() })
    }

    pub(crate) fn check(&self, l: UfLabel) -> Result<()> {
        let p = &self.params;
        let ok = match l {
            UfLabel::Principal(MonkAtom::Id) => true,
            UfLabel::Principal(MonkAtom::Coloured { colour, block, copy, .. }) => {
                colour < p.colours && block >> colour & 1 == 1 && self.blocks.contains(&block) && copy < p.copies
            }
            UfLabel::Block(w) => self.blocks.contains(&w),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{l} is not an ultrafilter of {p}")))
        }
    }

    /// `first` contains `x ; y` for every `x` in `second` and `y` in
    /// `third`. The relation is invariant under permuting the triple.
    pub(crate) fn consistent(&self, first: UfLabel, second: UfLabel, third: UfLabel) -> bool {
        use UfLabel::*;
        let t = [first, second, third];
        if let Some(k) = t.iter().position(|l| l.is_id()) {
            let rest: Vec<UfLabel> = (0..3).filter(|&i| i != k).map(|i| t[i]).collect();
            return rest[0] == rest[1];
        }
        let principal: Vec<MonkAtom> = t
            .iter()
            .filter_map(|l| match l {
                Principal(a) => Some(*a),
                Block(_) => None,
            })
            .collect();
        match principal.as_slice() {
            [a, b, c] => crate::monk::monk_consistent(&self.params, *a, *b, *c).unwrap_or(false),
            [MonkAtom::Coloured { block: s, .. }, MonkAtom::Coloured { block: z, .. }] => {
                // two atoms meet a block infinitely only through disjointness
                let w = t.iter().find_map(|l| if let Block(w) = l { Some(*w) } else { None }).expect("one block");
                s & z & w == 0
            }
            _ => true,
        }
    }
}

/// Whether `(first, second, third)` is a consistent triple of ultrafilters:
/// `X ; Y` lies in `first` for all `X` in `second` and `Y` in `third`.
pub fn uf_triple_consistent(first: UfLabel, second: UfLabel, third: UfLabel, p: &MonkParams) -> Result<bool> {
    let calc = UfCalculus::new(p)?;
    for l in [first, second, third] {
        calc.check(l)?;
    }
    Ok(calc.consistent(first, second, third))
}
