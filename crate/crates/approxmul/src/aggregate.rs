//! 8x8 multipliers composed from 3x3 and 2x2 sub-multipliers by segment
//! split, shift, and add, including the pruned third variant.
//!
//! Each 8-bit operand is split into a low 3-bit, mid 3-bit, and high 2-bit
//! segment. The nine segment-pair products are generated by sub-multipliers
//! `M0..M8` (row-major in the A segment, then the B segment), shifted by the
//! sum of the two segment offsets, and summed at full precision. `M8`, the
//! high-by-high pair, is always the exact 2x2 multiplier; 2-bit segments fed
//! to a 3x3 model are zero-extended.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mulcore::{ExactModel, Mul3x3_1, Mul3x3_2, Multiplier};

/// A contiguous bit field of an operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub offset: u32,
    pub width: u32,
}

impl Segment {
    pub fn extract(self, x: u32) -> u32 {
        (x >> self.offset) & ((1 << self.width) - 1)
    }

    fn label(self, operand: char) -> String {
        format!("{operand}[{}:{}]", self.offset + self.width - 1, self.offset)
    }
}

/// Disjoint segments covering bits 0..7 of each operand, low to high.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSplit {
    pub segments_a: Vec<Segment>,
    pub segments_b: Vec<Segment>,
}

impl Default for SegmentSplit {
    /// low = bits 2:0, mid = bits 5:3, high = bits 7:6.
    fn default() -> Self {
        let segs = vec![
            Segment { offset: 0, width: 3 },
            Segment { offset: 3, width: 3 },
            Segment { offset: 6, width: 2 },
        ];
        Self { segments_a: segs.clone(), segments_b: segs }
    }
}

/// One partial-product generator of a plan.
#[derive(Clone)]
pub struct SubProduct {
    /// Index in the `M0..M8` numbering.
    pub id: u8,
    /// Index into `split.segments_a`.
    pub seg_a: usize,
    /// Index into `split.segments_b`.
    pub seg_b: usize,
    pub model: Arc<dyn Multiplier>,
    /// Left shift of this product: the sum of the two segment offsets.
    pub shift: u32,
    pub pruned: bool,
}

/// Segment split plus the assignment of sub-multipliers to segment pairs.
#[derive(Clone)]
pub struct AggregationPlan {
    name: String,
    pub variant: Option<u8>,
    pub split: SegmentSplit,
    pub products: Vec<SubProduct>,
}

impl AggregationPlan {
    /// Build a plan from one model for the eight 3-bit-capable positions.
    /// The high-by-high pair always gets the exact 2x2 model.
    pub fn from_models(
        name: impl Into<String>,
        variant: Option<u8>,
        three_bit: Arc<dyn Multiplier>,
        pruned_ids: &[u8],
    ) -> Self {
        let split = SegmentSplit::default();
        let exact2: Arc<dyn Multiplier> = Arc::new(ExactModel::new(2));
        let mut products = Vec::with_capacity(9);
        let mut id = 0u8;
        for seg_a in 0..split.segments_a.len() {
            for seg_b in 0..split.segments_b.len() {
                let high_pair = seg_a == 2 && seg_b == 2;
                let shift =
                    split.segments_a[seg_a].offset + split.segments_b[seg_b].offset;
                products.push(SubProduct {
                    id,
                    seg_a,
                    seg_b,
                    model: if high_pair { exact2.clone() } else { three_bit.clone() },
                    shift,
                    pruned: pruned_ids.contains(&id),
                });
                id += 1;
            }
        }
        Self { name: name.into(), variant, split, products }
    }

    /// Sum of the non-pruned shifted partial products.
    pub fn aggregate_mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < 256 && b < 256);
        let mut sum = 0u32;
        for p in &self.products {
            if p.pruned {
                continue;
            }
            let sa = self.split.segments_a[p.seg_a].extract(a);
            let sb = self.split.segments_b[p.seg_b].extract(b);
            sum += p.model.eval(sa, sb) << p.shift;
        }
        sum
    }

    /// Plan with the given sub-multiplier marked pruned. Pruning the
    /// low-by-low product is refused; pruning twice is idempotent.
    pub fn prune(&self, id: u8) -> Result<Self> {
        let pos = self
            .products
            .iter()
            .position(|p| p.id == id)
            .ok_or(Error::UnknownSubMultiplier(id))?;
        let p = &self.products[pos];
        let low_a = self.split.segments_a[p.seg_a].offset == 0;
        let low_b = self.split.segments_b[p.seg_b].offset == 0;
        if low_a && low_b {
            return Err(Error::PruneLowLow);
        }
        let mut plan = self.clone();
        plan.products[pos].pruned = true;
        Ok(plan)
    }

    pub fn pruned_ids(&self) -> Vec<u8> {
        self.products.iter().filter(|p| p.pruned).map(|p| p.id).collect()
    }

    pub fn active_products(&self) -> usize {
        self.products.iter().filter(|p| !p.pruned).count()
    }

    /// Relabel sub-multiplier ids, for testing alternative id hypotheses.
    /// `map[i]` is the new id of the product currently numbered `i`.
    pub fn relabel_ids(&self, map: &[u8; 9]) -> Self {
        let mut plan = self.clone();
        for p in &mut plan.products {
            p.id = map[p.id as usize];
        }
        plan.products.sort_by_key(|p| p.id);
        plan
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Human-readable description, one line per product.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "plan {}", self.name);
        for p in &self.products {
            let _ = write!(
                s,
                "M{} {} {} {} shift {}",
                p.id,
                self.split.segments_a[p.seg_a].label('a'),
                self.split.segments_b[p.seg_b].label('b'),
                p.model.name(),
                p.shift
            );
            if p.pruned {
                let _ = write!(s, " pruned");
            }
            let _ = writeln!(s);
        }
        s
    }
}

impl Multiplier for AggregationPlan {
    fn name(&self) -> &str {
        &self.name
    }
    fn width_a(&self) -> u32 {
        8
    }
    fn width_b(&self) -> u32 {
        8
    }
    fn out_width(&self) -> u32 {
        17
    }
    fn eval(&self, a: u32, b: u32) -> u32 {
        self.aggregate_mul(a, b)
    }
}

/// Build one of the three published aggregation variants:
/// 1 = first 3x3 design everywhere, 2 = second design, 3 = second design
/// with M2 (the low-by-high product) pruned.
pub fn build_plan(variant: u8) -> Result<AggregationPlan> {
    let m1: Arc<dyn Multiplier> = Arc::new(Mul3x3_1);
    let m2: Arc<dyn Multiplier> = Arc::new(Mul3x3_2);
    match variant {
        1 => Ok(AggregationPlan::from_models("mul8x8_1", Some(1), m1, &[])),
        2 => Ok(AggregationPlan::from_models("mul8x8_2", Some(2), m2, &[])),
        3 => Ok(AggregationPlan::from_models("mul8x8_3", Some(3), m2, &[2])),
        other => Err(Error::UnknownVariant(other)),
    }
}

/// All-exact reference plan: same structure, exact sub-multipliers.
pub fn exact_plan() -> AggregationPlan {
    let exact3: Arc<dyn Multiplier> = Arc::new(ExactModel::new(3));
    AggregationPlan::from_models("exact8x8_plan", None, exact3, &[])
}

// ---------------------------------------------------------------------------
// 16-bit-input product LUT
// ---------------------------------------------------------------------------

const LUT_MAGIC: &[u8; 8] = b"AMLUT1\0\0";

/// Precomputed product table over all 8-bit operand pairs, the exchange
/// format between the multiplier models and the DNN evaluation.
///
/// Binary layout: 16-byte header (magic `AMLUT1\0\0`, width_a, width_b,
/// out_width, variant id, 4 reserved zero bytes), then `2^16` little-endian
/// `u32` entries indexed by `(a << 8) | b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lut {
    pub width_a: u32,
    pub width_b: u32,
    pub out_width: u32,
    /// Variant id from the header; 0 for plans outside the numbered variants.
    pub variant: u8,
    pub entries: Vec<u32>,
}

impl Lut {
    pub fn from_model(model: &dyn Multiplier) -> Result<Self> {
        if model.width_a() != 8 || model.width_b() != 8 {
            return Err(Error::Format(format!(
                "product LUT requires an 8x8 model, got {}x{}",
                model.width_a(),
                model.width_b()
            )));
        }
        let mut entries = Vec::with_capacity(1 << 16);
        for a in 0..256 {
            for b in 0..256 {
                entries.push(model.eval(a, b));
            }
        }
        Ok(Self {
            width_a: 8,
            width_b: 8,
            out_width: model.out_width(),
            variant: 0,
            entries,
        })
    }

    pub fn from_plan(plan: &AggregationPlan) -> Self {
        let mut lut = Self::from_model(plan).expect("plans are 8x8");
        lut.variant = plan.variant.unwrap_or(0);
        lut
    }

    /// The exact-product table.
    pub fn exact() -> Self {
        Self::from_model(&ExactModel::new(8)).expect("exact8 is 8x8")
    }

    #[inline]
    pub fn entry(&self, a: u8, b: u8) -> u32 {
        self.entries[((a as usize) << 8) | b as usize]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(16 + 4 * self.entries.len());
        buf.extend_from_slice(LUT_MAGIC);
        buf.push(self.width_a as u8);
        buf.push(self.width_b as u8);
        buf.push(self.out_width as u8);
        buf.push(self.variant);
        buf.extend_from_slice(&[0u8; 4]);
        for e in &self.entries {
            buf.extend_from_slice(&e.to_le_bytes());
        }
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(Error::Parse {
                offset: 0,
                message: format!("LUT file has {} bytes, shorter than the header", bytes.len()),
            });
        }
        if &bytes[..8] != LUT_MAGIC {
            return Err(Error::Parse {
                offset: 0,
                message: "bad LUT magic".into(),
            });
        }
        let width_a = bytes[8] as u32;
        let width_b = bytes[9] as u32;
        let out_width = bytes[10] as u32;
        let variant = bytes[11];
        let count = 1usize << (width_a + width_b);
        let expect = 16 + 4 * count;
        if bytes.len() != expect {
            return Err(Error::Parse {
                offset: bytes.len() as u64,
                message: format!("LUT file has {} bytes, expected {expect}", bytes.len()),
            });
        }
        let entries = bytes[16..]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(Self { width_a, width_b, out_width, variant, entries })
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
