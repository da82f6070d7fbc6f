//! Band-structure assembly: adaptive discriminant scans, band-edge root
//! finding on |D| = 1, and pairing of edges into allowed bands.

use crate::dispersion::{self, DiscriminantSample};
use crate::model::ModelParams;
use crate::susy;
use rayon::prelude::*;

/// Maximum interval halvings during the adaptive scan. Bands at α·a ≈ 8
/// are exponentially narrow and need deep refinement.
pub const DEFAULT_REFINE_DEPTH: u32 = 12;

/// Default relative band-edge refinement tolerance.
pub const DEFAULT_EDGE_TOL: f64 = 1e-10;

/// Neighbouring samples whose discriminant differs by more than this are
/// refined even without a wall crossing.
pub const JUMP_REFINE_THRESHOLD: f64 = 0.5;

/// Dead zone around |D| = 1: excursions smaller than this are rounding
/// noise (free limit tangencies), not wall crossings.
pub const EDGE_DETECT_EPS: f64 = 1e-12;

const DEFAULT_SCAN_POINTS: usize = 801;
const GAMMA_SAMPLES_PER_BAND: usize = 21;
const BISECT_MAX_ITER: usize = 200;

/// Which discriminant wall a band edge sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Crossing of D = +1.
    DPlusOne,
    /// Crossing of D = -1.
    DMinusOne,
    /// Clipped by the scan boundary, not a wall.
    Cutoff,
}

impl std::fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EdgeKind::DPlusOne => write!(f, "D=+1"),
            EdgeKind::DMinusOne => write!(f, "D=-1"),
            EdgeKind::Cutoff => write!(f, "cutoff"),
        }
    }
}

/// Allowed band `[e_lo, e_hi]` with wall classification and Bloch-phase
/// samples `(E, γ)`, `γ = arccos(D)/(2a) ∈ [0, π/(2a)]`.
#[derive(Debug, Clone)]
pub struct Band {
    pub e_lo: f64,
    pub e_hi: f64,
    pub edge_lo: EdgeKind,
    pub edge_hi: EdgeKind,
    pub samples: Vec<(f64, f64)>,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.e_hi - self.e_lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.e_lo + self.e_hi)
    }
}

/// Forbidden interval between two reported bands.
#[derive(Debug, Clone, Copy)]
pub struct Gap {
    pub e_lo: f64,
    pub e_hi: f64,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.e_hi - self.e_lo
    }
}

/// Non-fatal scan findings.
#[derive(Debug, Clone)]
pub enum ScanWarning {
    /// |D| jumped from one side of the band strip to the other inside a
    /// fully refined interval: a band narrower than the grid may hide there.
    IncompleteScan { e_lo: f64, e_hi: f64 },
    /// Assembled edges broke the expected wall ordering.
    EdgeOrderAnomaly { energy: f64 },
}

impl ScanWarning {
    pub fn is_incomplete_scan(&self) -> bool {
        matches!(self, ScanWarning::IncompleteScan { .. })
    }
}

/// Result of band-edge extraction over one scan segment.
#[derive(Debug, Clone)]
pub struct BandScan {
    pub bands: Vec<Band>,
    pub warnings: Vec<ScanWarning>,
}

/// Scan settings recorded in the assembled band structure.
#[derive(Debug, Clone, Copy)]
pub struct ScanMetadata {
    pub negative_range: Option<(f64, f64)>,
    pub positive_range: (f64, f64),
    pub scan_points: usize,
    pub edge_tolerance: f64,
    pub refine_depth: u32,
    pub gamma_samples_per_band: usize,
}

/// Full band structure below `e_cutoff`.
#[derive(Debug, Clone)]
pub struct BandStructure {
    pub params: ModelParams,
    pub negative_bands: Vec<Band>,
    pub positive_bands: Vec<Band>,
    /// Forbidden intervals between consecutive reported bands.
    pub gaps: Vec<Gap>,
    /// The lowest forbidden interval above E = 0, reported separately:
    /// it is the only visually significant positive-energy gap.
    pub first_positive_gap: Option<Gap>,
    pub warnings: Vec<ScanWarning>,
    pub metadata: ScanMetadata,
}

fn wall_crossing(d0: f64, d1: f64, wall: f64) -> bool {
    let g0 = d0 - wall;
    let g1 = d1 - wall;
    g0 * g1 < 0.0 && g0.abs().max(g1.abs()) > EDGE_DETECT_EPS
}

fn needs_refinement(s0: &DiscriminantSample, s1: &DiscriminantSample) -> bool {
    // jump refinement only matters near the band strip; far below the
    // spectrum D is astronomically large and every neighbour pair "jumps"
    let near_strip = s0.d.abs().min(s1.d.abs()) <= 2.0;
    wall_crossing(s0.d, s1.d, 1.0)
        || wall_crossing(s0.d, s1.d, -1.0)
        || (near_strip && (s1.d - s0.d).abs() > JUMP_REFINE_THRESHOLD)
}

/// Uniform samples of D(E) over `[e_min, e_max]`, with bound-level seed
/// points inserted for E < 0 and adaptive bisection wherever |D| crosses 1
/// or jumps between neighbours. Endpoints are included exactly; output is
/// sorted by energy.
pub fn scan_discriminant(
    params: &ModelParams,
    e_min: f64,
    e_max: f64,
    n: usize,
) -> Vec<DiscriminantSample> {
    assert!(e_min < e_max, "empty scan range");
    assert!(n >= 2, "need at least two scan points");

    let mut energies: Vec<f64> = (0..n)
        .map(|i| e_min + (e_max - e_min) * i as f64 / (n - 1) as f64)
        .collect();
    // uniform grids miss exponentially narrow bands; the bands sit at the
    // bound levels of the isolated well, so seed a log ladder around each
    if e_min < 0.0 {
        for eb in susy::bound_spectrum(params) {
            let mut seeds = vec![eb];
            for j in 2..=12 {
                let off = eb.abs() * 10f64.powi(-j);
                seeds.push(eb - off);
                seeds.push(eb + off);
            }
            energies.extend(seeds.into_iter().filter(|e| (e_min..=e_max).contains(e)));
        }
    }
    energies.sort_by(|a, b| a.partial_cmp(b).unwrap());
    energies.dedup();

    let mut samples: Vec<DiscriminantSample> = energies
        .par_iter()
        .map(|&e| dispersion::discriminant(params, e))
        .collect();

    // adaptive bisection of flagged intervals
    let mut depth = 0;
    while depth < DEFAULT_REFINE_DEPTH {
        let mids: Vec<f64> = samples
            .windows(2)
            .filter(|w| needs_refinement(&w[0], &w[1]))
            .map(|w| 0.5 * (w[0].energy + w[1].energy))
            .filter(|m| m.is_finite())
            .collect();
        if mids.is_empty() {
            break;
        }
        let mut extra: Vec<DiscriminantSample> = mids
            .par_iter()
            .map(|&e| dispersion::discriminant(params, e))
            .collect();
        samples.append(&mut extra);
        samples.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
        samples.dedup_by(|a, b| a.energy == b.energy);
        depth += 1;
    }
    samples
}

fn bisect_wall(params: &ModelParams, wall: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = dispersion::discriminant(params, lo).d - wall;
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol * mid.abs().max(1.0) {
            return mid;
        }
        let g_mid = dispersion::discriminant(params, mid).d - wall;
        if g_mid == 0.0 {
            return mid;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locate every |D| = 1 crossing in `[e_min, e_max]`, refine each by
/// bisection to `|ΔE| ≤ tol·max(1, |E|)`, and pair the crossings into
/// bands. Scan-boundary ends of clipped bands carry [`EdgeKind::Cutoff`].
pub fn find_band_edges(params: &ModelParams, e_min: f64, e_max: f64, tol: f64) -> BandScan {
    find_band_edges_with(params, e_min, e_max, tol, DEFAULT_SCAN_POINTS)
}

/// [`find_band_edges`] with an explicit base scan resolution.
pub fn find_band_edges_with(
    params: &ModelParams,
    e_min: f64,
    e_max: f64,
    tol: f64,
    scan_points: usize,
) -> BandScan {
    assert!(tol > 0.0);
    let samples = scan_discriminant(params, e_min, e_max, scan_points);
    let mut warnings = Vec::new();

    // refinement-resistant straddles: D jumps clean across the band strip
    for w in samples.windows(2) {
        let (d0, d1) = (w[0].d, w[1].d);
        if (d0 > 1.0 + EDGE_DETECT_EPS && d1 < -1.0 - EDGE_DETECT_EPS)
            || (d0 < -1.0 - EDGE_DETECT_EPS && d1 > 1.0 + EDGE_DETECT_EPS)
        {
            warnings.push(ScanWarning::IncompleteScan { e_lo: w[0].energy, e_hi: w[1].energy });
        }
    }

    let mut edges: Vec<(f64, EdgeKind)> = Vec::new();
    for w in samples.windows(2) {
        for (wall, kind) in [(1.0, EdgeKind::DPlusOne), (-1.0, EdgeKind::DMinusOne)] {
            if wall_crossing(w[0].d, w[1].d, wall) {
                let e = bisect_wall(params, wall, w[0].energy, w[1].energy, tol);
                edges.push((e, kind));
            }
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // classify the intervals delimited by the refined edges
    let mut boundaries: Vec<(f64, EdgeKind)> = Vec::with_capacity(edges.len() + 2);
    boundaries.push((e_min, EdgeKind::Cutoff));
    boundaries.extend(edges.iter().copied());
    boundaries.push((e_max, EdgeKind::Cutoff));

    let mut bands: Vec<Band> = Vec::new();
    for pair in boundaries.windows(2) {
        let (lo, lo_kind) = pair[0];
        let (hi, hi_kind) = pair[1];
        if hi <= lo {
            continue;
        }
        let d_mid = dispersion::discriminant(params, 0.5 * (lo + hi)).d;
        if d_mid.abs() <= 1.0 + EDGE_DETECT_EPS {
            match bands.last_mut() {
                // a boundary with allowed intervals on both sides is a
                // tangency, not a wall: merge across it
                Some(prev) if prev.e_hi == lo => {
                    prev.e_hi = hi;
                    prev.edge_hi = hi_kind;
                }
                _ => bands.push(Band {
                    e_lo: lo,
                    e_hi: hi,
                    edge_lo: lo_kind,
                    edge_hi: hi_kind,
                    samples: Vec::new(),
                }),
            }
        }
    }

    // Hill ordering: walls are opposite within a band, equal across a gap
    for band in &bands {
        if band.edge_lo != EdgeKind::Cutoff
            && band.edge_hi != EdgeKind::Cutoff
            && band.edge_lo == band.edge_hi
        {
            warnings.push(ScanWarning::EdgeOrderAnomaly { energy: band.e_lo });
        }
    }
    // a band squeezed to the floating-point floor is not resolved, only
    // located: its true width may be far below the reported one
    for band in &bands {
        let ulp = f64::EPSILON * band.e_lo.abs().max(band.e_hi.abs()).max(1.0);
        if band.edge_lo != EdgeKind::Cutoff
            && band.edge_hi != EdgeKind::Cutoff
            && band.width() <= 8.0 * ulp
        {
            warnings.push(ScanWarning::IncompleteScan { e_lo: band.e_lo, e_hi: band.e_hi });
        }
    }
    for w in bands.windows(2) {
        let (hi, lo) = (w[0].edge_hi, w[1].edge_lo);
        if hi != EdgeKind::Cutoff && lo != EdgeKind::Cutoff && hi != lo {
            warnings.push(ScanWarning::EdgeOrderAnomaly { energy: w[1].e_lo });
        }
    }

    BandScan { bands, warnings }
}

fn fill_gamma_samples(params: &ModelParams, band: &mut Band, n: usize) {
    let two_a = params.period();
    // a wall edge is by definition the D = ±1 locus; computing arccos there
    // would turn the edge-location tolerance into a √-amplified phase error
    let wall_gamma = |kind: EdgeKind| match kind {
        EdgeKind::DPlusOne => Some(0.0),
        EdgeKind::DMinusOne => Some(std::f64::consts::PI / two_a),
        EdgeKind::Cutoff => None,
    };
    band.samples = (0..n)
        .map(|i| {
            let e = band.e_lo + (band.e_hi - band.e_lo) * i as f64 / (n - 1) as f64;
            let exact = if i == 0 {
                wall_gamma(band.edge_lo)
            } else if i == n - 1 {
                wall_gamma(band.edge_hi)
            } else {
                None
            };
            let gamma = exact.unwrap_or_else(|| {
                let d = dispersion::discriminant(params, e).d.clamp(-1.0, 1.0);
                d.acos() / two_a
            });
            (e, gamma)
        })
        .collect();
}

/// Assemble the band structure: negative bands over an adaptively widened
/// window around the bound spectrum, positive bands over `(0, e_cutoff]`.
/// The two scans share the boundary E = 0 and never straddle it.
pub fn band_structure(params: &ModelParams, e_cutoff: f64) -> BandStructure {
    assert!(e_cutoff > 0.0, "cutoff must be positive");
    let bound = susy::bound_spectrum(params);
    let mut neg_lo = 1.5 * bound[0];
    // widen until the scan bottom is genuinely below the lowest band
    // (for shallow wells the lowest band edge dips below 1.5·E_ground)
    for _ in 0..8 {
        if dispersion::discriminant(params, neg_lo).d > 1.0 + 1e-9 {
            break;
        }
        neg_lo *= 1.4;
    }

    let tol = DEFAULT_EDGE_TOL;
    let neg_scan = find_band_edges(params, neg_lo, 0.0, tol);
    let pos_scan = find_band_edges(params, 0.0, e_cutoff, tol);

    let mut warnings = neg_scan.warnings;
    warnings.extend(pos_scan.warnings);

    let mut negative_bands = neg_scan.bands;
    let mut positive_bands = pos_scan.bands;
    for band in negative_bands.iter_mut().chain(positive_bands.iter_mut()) {
        fill_gamma_samples(params, band, GAMMA_SAMPLES_PER_BAND);
    }

    let mut gaps = Vec::new();
    let all: Vec<&Band> = negative_bands.iter().chain(positive_bands.iter()).collect();
    for w in all.windows(2) {
        let (lo, hi) = (w[0].e_hi, w[1].e_lo);
        if hi - lo > EDGE_DETECT_EPS.max(1e-12 * hi.abs()) {
            gaps.push(Gap { e_lo: lo, e_hi: hi });
        }
    }
    let first_positive_gap = gaps.iter().find(|g| g.e_hi > 0.0).copied();

    BandStructure {
        params: *params,
        negative_bands,
        positive_bands,
        gaps,
        first_positive_gap,
        warnings,
        metadata: ScanMetadata {
            negative_range: Some((neg_lo, 0.0)),
            positive_range: (0.0, e_cutoff),
            scan_points: DEFAULT_SCAN_POINTS,
            edge_tolerance: tol,
            refine_depth: DEFAULT_REFINE_DEPTH,
            gamma_samples_per_band: GAMMA_SAMPLES_PER_BAND,
        },
    }
}
