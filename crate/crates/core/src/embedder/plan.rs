//! Region bookkeeping and the rule tables.
//!
//! A host region is a sub-cube: the bits above `dim` are fixed and the low
//! `dim` bits are free. Sharing the high bits means the region is itself a
//! crossed cube of dimension `dim` on its low bits.
//!
//! * A **flat** region holds its subtree root at the region origin and gives
//!   child `s` the quarter whose top two bits are the code of `s`
//!   (1 → `01`, 2 → `10`, 3 → `11`). This is used whenever `PQT_{k-1}` fits a
//!   quarter.
//! * A **deep** region is used when it does not. Inside it the top bit
//!   plays the role of the half selector `C`, the next two bits are the
//!   prefix `Pref_j`, the lowest two bits are the supernode address `X`,
//!   and everything in between is inherited from the parent image. Children
//!   are placed by the situation-2 templates below, after the flat rule on
//!   the next unused bit pair when one is left.

use crate::embedder::{EmbedError, Result, RuleTag};
use crate::topology::Graph;

/// Host dimension for `PQT_n`.
///
/// Up to `n = 8` this is the smallest `m` with `2^m >= (3^n - 1) / 2`;
/// beyond that every extra level costs two dimensions.
pub fn dimension_for(n: u32) -> Result<u32> {
    if n < 2 {
        return Err(EmbedError::HeightTooSmall(n));
    }
    Ok(min_dim(n))
}

fn min_dim(k: u32) -> u32 {
    if k <= 1 {
        0
    } else if k <= 8 {
        let size = (3u64.pow(k) - 1) / 2;
        64 - (size - 1).leading_zeros()
    } else {
        (k - 8) * 2 + 12
    }
}

/// How much of the rule table is offered below the root of a deep region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSet {
    /// Flat rule on the next free pair, then every situation-2 template.
    Full,
    /// Flat rule on the next free pair only.
    FlatOnly,
}

/// Placement context of one guest vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// At the origin of a flat region with `dim` free bits.
    Flat { dim: u32 },
    /// At the origin of a deep region.
    DeepRoot { dim: u32 },
    /// Below the root of a deep region; `cursor` is the high bit of the next
    /// unused bit pair, if one is left.
    Deep { dim: u32, cursor: Option<u32> },
}

fn frame_for(height: u32, dim: u32) -> Frame {
    if height <= 1 || (dim >= 2 && min_dim(height - 1) <= dim - 2) {
        Frame::Flat { dim }
    } else {
        Frame::DeepRoot { dim }
    }
}

/// Frames for every guest vertex, fixed before any placement happens.
#[derive(Debug, Clone)]
pub struct Plan {
    frames: Vec<Frame>,
}

impl Plan {
    pub fn new(guest: &Graph, m: u32) -> Self {
        let n = guest.order();
        let mut frames = vec![Frame::Flat { dim: 0 }; guest.vertex_count()];
        frames[0] = frame_for(n, m);
        // Preorder ids: parents come first.
        for v in 1..guest.vertex_count() {
            let p = guest.parent(v).expect("non-root vertex has a parent");
            let height = n + 1 - guest.address(v).map_or(1, |a| a.depth() as u32);
            frames[v] = match frames[p] {
                Frame::Flat { dim } => frame_for(height, dim.saturating_sub(2)),
                Frame::DeepRoot { dim } => Frame::Deep {
                    dim,
                    cursor: dim.checked_sub(4),
                },
                Frame::Deep { dim, cursor } => Frame::Deep {
                    dim,
                    cursor: cursor.filter(|&c| c >= 3).map(|c| c - 2),
                },
            };
        }
        Plan { frames }
    }

    pub fn frame(&self, v: usize) -> Frame {
        self.frames[v]
    }

    /// Rule alternatives for the child with suffix `suffix` of a parent
    /// whose frame is `parent` and whose image is `image`, in listed order.
    pub fn alternatives(
        &self,
        parent: Frame,
        image: u32,
        suffix: u8,
        rules: RuleSet,
    ) -> Vec<(u32, RuleTag)> {
        let s = usize::from(suffix - 1);
        let mut out = Vec::new();
        match parent {
            Frame::Flat { dim } => {
                if dim >= 2 {
                    out.push((set_pair(image, dim - 2, CODES[s]), RuleTag::Situation1));
                }
            }
            Frame::DeepRoot { dim } => {
                push_templates(&mut out, image, dim, s, &TEMPLATES[..2]);
            }
            Frame::Deep { dim, cursor } => {
                if let Some(c) = cursor {
                    if (image >> (c - 1)) & 3 == 0 {
                        out.push((set_pair(image, c - 1, CODES[s]), RuleTag::Situation1));
                    }
                }
                if rules == RuleSet::Full {
                    push_templates(&mut out, image, dim, s, &TEMPLATES);
                }
            }
        }
        let mut seen = Vec::with_capacity(out.len());
        out.retain(|&(x, _)| {
            x != image && !seen.contains(&x) && {
                seen.push(x);
                true
            }
        });
        out
    }

    /// Connector vertices an edge rule prescribes between a parent image and
    /// a child image placed by `tag`, in preference order.
    ///
    /// A flat edge clears the low digit of the code first (`Pref_0 00 -
    /// Pref_2 00 - Pref_3 00`). A situation-2 edge applies part of the
    /// child's changes: the prefix, then the half bit, then the supernode
    /// address, then combinations, then single bits.
    pub fn connectors(&self, parent: Frame, from: u32, to: u32, tag: RuleTag) -> Vec<u32> {
        let diff = from ^ to;
        if diff == 0 {
            return Vec::new();
        }
        match tag {
            RuleTag::Situation1 | RuleTag::Prem => {
                let top = 31 - diff.leading_zeros();
                vec![from ^ (1 << top)]
            }
            RuleTag::SearchFallback | RuleTag::Fixed => Vec::new(),
            _ => {
                let dim = match parent {
                    Frame::Flat { dim } | Frame::DeepRoot { dim } | Frame::Deep { dim, .. } => dim,
                };
                if dim < 5 {
                    return Vec::new();
                }
                let half = 1u32 << (dim - 1);
                let pref = 3u32 << (dim - 3);
                let addr = 3u32;
                let fields = [pref, half, addr, pref | half, pref | addr, half | addr];
                let mut masks: Vec<u32> = fields.iter().map(|&f| diff & f).collect();
                let mut rest: Vec<u32> = submasks(diff).collect();
                rest.sort_unstable_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(b.cmp(a)));
                masks.extend(rest);
                let mut out: Vec<u32> = Vec::new();
                for mask in masks {
                    if mask != 0 && mask != diff && !out.contains(&(from ^ mask)) {
                        out.push(from ^ mask);
                    }
                }
                out
            }
        }
    }
}

/// Non-empty proper submasks of `mask`.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut sub = mask;
    std::iter::from_fn(move || {
        sub = (sub.wrapping_sub(1)) & mask;
        (sub != 0).then_some(sub)
    })
}

/// 2-bit codes of suffixes 1, 2, 3.
const CODES: [u32; 3] = [0b01, 0b10, 0b11];

#[derive(Debug, Clone, Copy)]
enum HalfBit {
    Same,
    Flip,
}

#[derive(Debug, Clone, Copy)]
enum PrefOp {
    Keep,
    Set(u32),
}

/// Situation-2 templates: per child suffix, what happens to the half bit
/// `C` and the prefix pair. Unbarred digits keep the parent's half, barred
/// ones cross to the other half.
struct Template {
    tag: RuleTag,
    children: [(HalfBit, PrefOp); 3],
}

const TEMPLATES: [Template; 6] = {
    use HalfBit::*;
    use PrefOp::*;
    [
        // 0 Pref_1 00X, 1 Pref_1 00Y, 1 Pref_0 00Z
        Template {
            tag: RuleTag::Situation2Case1a,
            children: [(Same, Set(0b01)), (Flip, Set(0b01)), (Flip, Set(0b00))],
        },
        // 0̄ Pref_1 00X, 1̄ Pref_1 00Y, 1 Pref_0 00Z
        Template {
            tag: RuleTag::Situation2Case1b,
            children: [(Flip, Set(0b01)), (Same, Set(0b01)), (Flip, Set(0b00))],
        },
        // Supernode-local moves with one crossing, as in the n = 5 example
        // rows rooted at 03.
        Template {
            tag: RuleTag::Situation2Case2,
            children: [(Same, Keep), (Flip, Keep), (Same, Keep)],
        },
        // 0̄ Pref_1 00X, 1̄ Pref_1 00Y, 1̄ Pref_1 00Z
        Template {
            tag: RuleTag::Situation2Case3a,
            children: [(Flip, Set(0b01)), (Same, Set(0b01)), (Same, Set(0b01))],
        },
        // 0̄ Pref_t 00X, 1 Pref_t 00Y, 1̄ Pref_t 00Z for t = 2, 3
        Template {
            tag: RuleTag::Situation2Case3bT2,
            children: [(Flip, Set(0b10)), (Flip, Set(0b10)), (Same, Set(0b10))],
        },
        Template {
            tag: RuleTag::Situation2Case3bT3,
            children: [(Flip, Set(0b11)), (Flip, Set(0b11)), (Same, Set(0b11))],
        },
    ]
};

fn set_pair(image: u32, low_bit: u32, code: u32) -> u32 {
    (image & !(3 << low_bit)) | (code << low_bit)
}

fn push_templates(
    out: &mut Vec<(u32, RuleTag)>,
    image: u32,
    dim: u32,
    s: usize,
    templates: &[Template],
) {
    if dim < 5 {
        return;
    }
    for t in templates {
        let (half, pref) = t.children[s];
        let mut base = image;
        if let HalfBit::Flip = half {
            base ^= 1 << (dim - 1);
        }
        if let PrefOp::Set(code) = pref {
            base = set_pair(base, dim - 3, code);
        }
        // X, Y, Z: first fit over the four supernode addresses.
        for x in 0..4 {
            out.push((set_pair(base, 0, x), t.tag));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::build_pqt;

    #[test]
    fn dimension_table() {
        let want = [
            (2, 2),
            (3, 4),
            (4, 6),
            (5, 7),
            (6, 9),
            (7, 11),
            (8, 12),
            (9, 14),
            (10, 16),
        ];
        for (n, m) in want {
            assert_eq!(dimension_for(n).unwrap(), m, "n={n}");
        }
        assert!(dimension_for(1).is_err());
        assert!(dimension_for(0).is_err());
    }

    #[test]
    fn dimension_is_monotone_and_meets_at_eight() {
        let dims: Vec<u32> = (2..=12).map(|n| dimension_for(n).unwrap()).collect();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]));
        let by_log = 64 - ((3u64.pow(8) - 1) / 2 - 1).leading_zeros();
        let linear = |n: u32| (n - 8) * 2 + 12;
        assert_eq!(by_log, linear(8));
    }

    #[test]
    fn dimension_always_has_room() {
        for n in 2..=12u32 {
            let size = (3u64.pow(n) - 1) / 2;
            assert!(size <= 1u64 << dimension_for(n).unwrap());
        }
    }

    #[test]
    fn flat_and_deep_regions() {
        let frame_of_root =
            |n| Plan::new(&build_pqt(n).unwrap(), dimension_for(n).unwrap()).frame(0);
        assert_eq!(frame_of_root(3), Frame::Flat { dim: 4 });
        assert_eq!(frame_of_root(4), Frame::Flat { dim: 6 });
        assert_eq!(frame_of_root(5), Frame::DeepRoot { dim: 7 });
        assert_eq!(frame_of_root(6), Frame::Flat { dim: 9 });
        assert_eq!(frame_of_root(7), Frame::Flat { dim: 11 });
        assert_eq!(frame_of_root(8), Frame::DeepRoot { dim: 12 });
        assert_eq!(frame_of_root(9), Frame::Flat { dim: 14 });
        let g = build_pqt(6).unwrap();
        let plan = Plan::new(&g, 9);
        let id = g.id_of_address(&"01".parse().unwrap()).unwrap();
        assert_eq!(plan.frame(id), Frame::DeepRoot { dim: 7 });
    }

    #[test]
    fn deep_root_alternatives_start_with_the_anchor_prefixes() {
        let g = build_pqt(5).unwrap();
        let plan = Plan::new(&g, 7);
        let first: Vec<u32> = (1..=3)
            .map(|s| plan.alternatives(plan.frame(0), 0, s, RuleSet::Full)[0].0)
            .collect();
        assert_eq!(first, vec![0b0010000, 0b1010000, 0b1000000]);
    }

    #[test]
    fn submask_enumeration() {
        let mut subs: Vec<u32> = submasks(0b1010).collect();
        subs.sort_unstable();
        assert_eq!(subs, vec![0b0010, 0b1000]);
        assert_eq!(submasks(0b1).count(), 0);
    }

    #[test]
    fn deep_connectors_apply_part_of_the_change() {
        let g = build_pqt(5).unwrap();
        let plan = Plan::new(&g, 7);
        let c = plan.connectors(
            plan.frame(0),
            0b0000000,
            0b1010000,
            RuleTag::Situation2Case1a,
        );
        assert_eq!(&c[..2], &[0b0010000, 0b1000000]);
        assert!(c.iter().all(|&w| w != 0 && w != 0b1010000));
    }

    #[test]
    fn flat_connector_goes_through_pref_two() {
        let g = build_pqt(3).unwrap();
        let plan = Plan::new(&g, 4);
        assert_eq!(
            plan.connectors(plan.frame(0), 0b0000, 0b1100, RuleTag::Situation1),
            vec![0b1000]
        );
    }
}
