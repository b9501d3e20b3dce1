//! Grayscale segmentation by intensity clustering with neighborhood membership smoothing,
//! synthetic test images, and segmentation scores.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{normalize_with, Dataset, NormalizationRecord};
use crate::error::{Error, Result};
use crate::fcm::{fcm_fit, FcmConfig, FcmResult};
use crate::metrics::matched_count;
use crate::pipeline::indeterminacy_for;
use crate::solver::{fit, FitResult, SolverConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Pixels as an `n x 1` intensity dataset, row-major.
    pub fn to_dataset(&self) -> Result<Dataset> {
        let values: Vec<f64> = self.pixels.iter().map(|&p| p as f64).collect();
        let points = Array2::from_shape_vec((values.len(), 1), values)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Dataset::new("image", points, None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    width: usize,
    height: usize,
    labels: Vec<usize>,
}

impl LabelImage {
    pub fn new(width: usize, height: usize, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for a {width}x{height} image",
                labels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Spreads ids evenly over 0..=255 for viewing.
    pub fn to_gray(&self) -> GrayImage {
        let top = self.num_labels().saturating_sub(1).max(1);
        let pixels = self
            .labels
            .iter()
            .map(|&l| ((l.min(top) * 255) / top) as u8)
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }

    /// Recovers ids from a gray rendering: distinct gray levels in ascending order.
    pub fn from_gray(img: &GrayImage) -> Self {
        let mut levels: Vec<u8> = img.pixels.clone();
        levels.sort_unstable();
        levels.dedup();
        let labels = img
            .pixels
            .iter()
            .map(|p| levels.binary_search(p).expect("level present"))
            .collect();
        Self {
            width: img.width,
            height: img.height,
            labels,
        }
    }
}

/// Binary mask; image pixels at or above 128 are foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} mask entries for a {width}x{height} image",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_gray(img: &GrayImage) -> Self {
        Self {
            width: img.width,
            height: img.height,
            bits: img.pixels.iter().map(|&p| p >= 128).collect(),
        }
    }

    /// Foreground where the label equals one of `ids`.
    pub fn from_labels(labels: &LabelImage, ids: &[usize]) -> Self {
        Self {
            width: labels.width,
            height: labels.height,
            bits: labels.labels.iter().map(|l| ids.contains(l)).collect(),
        }
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Four equal quadrants with grays 50 (top left), 100 (top right), 150 (bottom left) and
/// 200 (bottom right); labels 0..4 in the same order.
pub fn synth_quadrant_image(side: usize) -> Result<(GrayImage, LabelImage)> {
    if side == 0 || !side.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "quadrant side must be even and positive, got {side}"
        )));
    }
    let half = side / 2;
    let labels: Vec<usize> = (0..side * side)
        .map(|idx| {
            let (x, y) = (idx % side, idx / side);
            usize::from(x >= half) + 2 * usize::from(y >= half)
        })
        .collect();
    let grays = [50u8, 100, 150, 200];
    let pixels = labels.iter().map(|&l| grays[l]).collect();
    Ok((
        GrayImage::new(side, side, pixels)?,
        LabelImage::new(side, side, labels)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepsSpec {
    pub width: usize,
    pub height: usize,
    pub background: u8,
    pub upper: u8,
    pub lower: u8,
}

impl Default for StepsSpec {
    fn default() -> Self {
        Self {
            width: 128,
            height: 128,
            background: 255,
            upper: 20,
            lower: 100,
        }
    }
}

/// Two stacked, horizontally centered rectangles of size `w/2 x h/4` on a uniform
/// background: the upper occupies rows `h/4..h/2`, the lower `h/2..3h/4`. Labels are
/// background 0, upper 1, lower 2.
pub fn synth_steps_image(spec: &StepsSpec) -> Result<(GrayImage, LabelImage)> {
    let (w, h) = (spec.width, spec.height);
    if w == 0 || h == 0 || w % 2 != 0 || h % 4 != 0 {
        return Err(Error::InvalidInput(format!(
            "steps image needs even width and height divisible by 4, got {w}x{h}"
        )));
    }
    let (x0, x1) = (w / 4, w / 4 + w / 2);
    let labels: Vec<usize> = (0..w * h)
        .map(|idx| {
            let (x, y) = (idx % w, idx / w);
            if !(x0..x1).contains(&x) {
                0
            } else if (h / 4..h / 2).contains(&y) {
                1
            } else if (h / 2..3 * h / 4).contains(&y) {
                2
            } else {
                0
            }
        })
        .collect();
    let grays = [spec.background, spec.upper, spec.lower];
    let pixels = labels.iter().map(|&l| grays[l]).collect();
    Ok((
        GrayImage::new(w, h, pixels)?,
        LabelImage::new(w, h, labels)?,
    ))
}

/// Standard normal pairs by Box-Muller from a SplitMix64 stream. Each pair consumes two
/// 64-bit outputs `x, y`: `u1 = ((x >> 11) + 1) / 2^53` in (0, 1], `u2 = (y >> 11) / 2^53`,
/// `z0 = r cos(2 pi u2)`, `z1 = r sin(2 pi u2)` with `r = sqrt(-2 ln u1)`.
pub struct GaussianStream {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let x = self.rng.next_u64();
        let y = self.rng.next_u64();
        let u1 = ((x >> 11) + 1) as f64 * SCALE;
        let u2 = (y >> 11) as f64 * SCALE;
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Adds N(mu, sigma^2) to every pixel in row-major order, rounds half away from zero and
/// clamps to 0..=255.
pub fn add_gaussian_noise(img: &GrayImage, mu: f64, sigma: f64, seed: u64) -> Result<GrayImage> {
    if !(sigma >= 0.0 && sigma.is_finite() && mu.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bad noise parameters mu={mu}, sigma={sigma}"
        )));
    }
    let mut stream = GaussianStream::new(seed);
    let pixels = img
        .pixels
        .iter()
        .map(|&p| {
            let v = p as f64 + mu + sigma * stream.next_standard();
            v.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(img.width, img.height, pixels)
}

/// Mean of T and F over the `z x z` window around each pixel, replicating edge pixels.
pub fn smooth_memberships(
    t: ArrayView2<f64>,
    f: ArrayView1<f64>,
    width: usize,
    height: usize,
    z: usize,
) -> Result<(Array2<f64>, Array1<f64>)> {
    if z == 0 || z.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "window size must be odd, got {z}"
        )));
    }
    let n = width * height;
    if t.nrows() != n || f.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} membership rows for a {width}x{height} image",
            t.nrows()
        )));
    }
    let k = t.ncols();
    let r = (z / 2) as isize;
    let norm = (z * z) as f64;
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;
    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = ((idx % width) as isize, (idx / width) as isize);
            let mut acc = vec![0.0; k];
            let mut acc_f = 0.0;
            for dy in -r..=r {
                let yy = clamp(y + dy, height);
                for dx in -r..=r {
                    let src = yy * width + clamp(x + dx, width);
                    for (j, a) in acc.iter_mut().enumerate() {
                        *a += t[[src, j]];
                    }
                    acc_f += f[src];
                }
            }
            (acc.into_iter().map(|v| v / norm).collect(), acc_f / norm)
        })
        .collect();
    let mut t_bar = Array2::zeros((n, k));
    let mut f_bar = Array1::zeros(n);
    for (i, (row, fv)) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            t_bar[[i, j]] = v;
        }
        f_bar[i] = fv;
    }
    Ok((t_bar, f_bar))
}

/// Window size used by [`segment`].
pub const SMOOTHING_WINDOW: usize = 3;

fn argmax_rows(t: &Array2<f64>) -> Vec<usize> {
    t.rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (j, &v)| {
                    if v > best.1 {
                        (j, v)
                    } else {
                        best
                    }
                })
                .0
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Segmentation {
    pub labels: LabelImage,
    pub fit: FitResult,
    pub record: NormalizationRecord,
    pub smoothed_t: Array2<f64>,
    pub smoothed_f: Array1<f64>,
}

/// Clusters pixel intensities, smooths memberships over a 3x3 window and labels each pixel
/// by its largest smoothed T.
pub fn segment(img: &GrayImage, cfg: &SolverConfig) -> Result<Segmentation> {
    cfg.validate()?;
    let raw = img.to_dataset()?;
    if raw.len() < cfg.num_clusters {
        return Err(Error::NotEnoughPoints {
            points: raw.len(),
            clusters: cfg.num_clusters,
        });
    }
    let (normalized, record) = normalize_with(&raw, cfg.scale_mode)?;
    let indet = indeterminacy_for(&raw, &normalized, cfg)?;
    let result = fit(normalized.points(), &indet, cfg)?;
    let (smoothed_t, smoothed_f) = smooth_memberships(
        result.partition.t.view(),
        result.partition.f.view(),
        img.width,
        img.height,
        SMOOTHING_WINDOW,
    )?;
    let labels = LabelImage::new(img.width, img.height, argmax_rows(&smoothed_t))?;
    Ok(Segmentation {
        labels,
        fit: result,
        record,
        smoothed_t,
        smoothed_f,
    })
}

/// Plain FCM on normalized intensities, per-pixel argmax, no smoothing.
pub fn segment_fcm(img: &GrayImage, cfg: &FcmConfig) -> Result<(LabelImage, FcmResult)> {
    let raw = img.to_dataset()?;
    let (normalized, _) = normalize_with(&raw, crate::dataset::ScaleMode::Diameter)?;
    let result = fcm_fit(normalized.points(), cfg)?;
    let labels = LabelImage::new(img.width, img.height, result.hard_labels())?;
    Ok((labels, result))
}

/// Pixels that disagree with the truth after the best one-to-one relabeling.
pub fn count_misclassified(pred: &LabelImage, truth: &LabelImage) -> Result<usize> {
    if (pred.width, pred.height) != (truth.width, truth.height) {
        return Err(Error::ShapeMismatch(format!(
            "prediction is {}x{}, truth is {}x{}",
            pred.width, pred.height, truth.width, truth.height
        )));
    }
    Ok(truth.labels.len() - matched_count(&pred.labels, &truth.labels)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FMeasure {
    pub f: f64,
    pub precision: f64,
    pub recall: f64,
}

/// `F = P R / (psi P + (1 - psi) R)`. P (or R) is 1 when nothing was predicted (or nothing
/// is true); F is 0 when both are 0.
pub fn f_measure(pred: &Mask, truth: &Mask, psi: f64) -> Result<FMeasure> {
    if (pred.width, pred.height) != (truth.width, truth.height) {
        return Err(Error::ShapeMismatch("mask dimensions differ".into()));
    }
    if !(psi > 0.0 && psi < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "psi must lie in (0, 1), got {psi}"
        )));
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &t) in pred.bits.iter().zip(&truth.bits) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Ok(FMeasure {
        f: f_from(precision, recall, psi),
        precision,
        recall,
    })
}

pub fn f_from(precision: f64, recall: f64, psi: f64) -> f64 {
    if precision == 0.0 && recall == 0.0 {
        0.0
    } else {
        precision * recall / (psi * precision + (1.0 - psi) * recall)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::RngCore;

    #[test]
    fn quadrant_layout() {
        let (img, truth) = synth_quadrant_image(128).unwrap();
        assert_eq!(img.get(0, 0), 50);
        assert_eq!(img.get(127, 0), 100);
        assert_eq!(img.get(0, 127), 150);
        assert_eq!(img.get(127, 127), 200);
        for g in [50u8, 100, 150, 200] {
            assert_eq!(img.pixels().iter().filter(|&&p| p == g).count(), 4096);
        }
        assert_eq!(truth.num_labels(), 4);
        assert!(synth_quadrant_image(7).is_err());
    }

    #[test]
    fn steps_layout() {
        let (img, truth) = synth_steps_image(&StepsSpec::default()).unwrap();
        let mut grays: Vec<u8> = img.pixels().to_vec();
        grays.sort_unstable();
        grays.dedup();
        assert_eq!(grays, vec![20, 100, 255]);
        let area = 128 * 128;
        assert_eq!(
            img.pixels().iter().filter(|&&p| p == 255).count(),
            area - 2 * (area / 8)
        );
        assert_eq!(truth.num_labels(), 3);
        assert_eq!(img.get(64, 40), 20);
        assert_eq!(img.get(64, 80), 100);
        assert!(synth_steps_image(&StepsSpec {
            height: 30,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn splitmix_reference_output() {
        // first output of SplitMix64 with state 0
        let mut rng = SplitMix64::seed_from_u64(0);
        assert_eq!(rng.next_u64(), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn box_muller_pairs_share_draws() {
        let mut raw = SplitMix64::seed_from_u64(9);
        let (x, y) = (raw.next_u64(), raw.next_u64());
        let u1 = ((x >> 11) + 1) as f64 / 9007199254740992.0;
        let u2 = (y >> 11) as f64 / 9007199254740992.0;
        let r = (-2.0 * u1.ln()).sqrt();
        let mut s = GaussianStream::new(9);
        assert_eq!(
            s.next_standard(),
            r * (2.0 * std::f64::consts::PI * u2).cos()
        );
        assert_eq!(
            s.next_standard(),
            r * (2.0 * std::f64::consts::PI * u2).sin()
        );
    }

    #[test]
    fn zero_noise_is_identity_and_seeded_noise_repeats() {
        let (img, _) = synth_quadrant_image(16).unwrap();
        assert_eq!(add_gaussian_noise(&img, 0.0, 0.0, 5).unwrap(), img);
        let a = add_gaussian_noise(&img, 0.0, 25.5, 5).unwrap();
        let b = add_gaussian_noise(&img, 0.0, 25.5, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_gaussian_noise(&img, 0.0, 25.5, 6).unwrap());
        assert!(add_gaussian_noise(&img, 0.0, -1.0, 5).is_err());
    }

    #[test]
    fn noisy_quadrant_means_stay_near_nominal() {
        let (img, truth) = synth_quadrant_image(128).unwrap();
        let noisy = add_gaussian_noise(&img, 0.0, 25.5, 1).unwrap();
        for (q, nominal) in [50.0, 100.0, 150.0, 200.0].iter().enumerate() {
            let vals: Vec<f64> = noisy
                .pixels()
                .iter()
                .zip(truth.labels())
                .filter(|(_, &l)| l == q)
                .map(|(&p, _)| p as f64)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((mean - nominal).abs() <= 1.5, "quadrant {q}: {mean}");
        }
    }

    #[test]
    fn smoothing_single_bump() {
        let (w, h) = (5, 5);
        let mut t = Array2::from_elem((25, 2), 0.4);
        let f = Array1::from_elem(25, 0.2);
        t[[12, 0]] = 0.4 + 0.09;
        t[[12, 1]] = 0.4 - 0.09;
        let (tb, fb) = smooth_memberships(t.view(), f.view(), w, h, 3).unwrap();
        for idx in [6, 7, 8, 11, 13, 16, 17, 18] {
            assert!((tb[[idx, 0]] - 0.41).abs() < 1e-15);
            assert!((tb[[idx, 1]] - 0.39).abs() < 1e-15);
        }
        assert!((tb[[0, 0]] - 0.4).abs() < 1e-15);
        assert!(fb.iter().all(|&v| (v - 0.2).abs() < 1e-15));
        assert!(smooth_memberships(t.view(), f.view(), w, h, 2).is_err());
    }

    #[test]
    fn noiseless_quadrant_segments_perfectly() {
        let (img, truth) = synth_quadrant_image(32).unwrap();
        let seg = segment(&img, &SolverConfig::with_clusters(4)).unwrap();
        assert_eq!(count_misclassified(&seg.labels, &truth).unwrap(), 0);
    }

    #[test]
    fn constant_image_is_one_cluster() {
        let img = GrayImage::filled(8, 8, 77).unwrap();
        let seg = segment(&img, &SolverConfig::with_clusters(2)).unwrap();
        let first = seg.labels.labels()[0];
        assert!(seg.labels.labels().iter().all(|&l| l == first));
    }

    #[test]
    fn misclassified_counting() {
        let truth = LabelImage::new(4, 2, vec![0, 0, 1, 1, 2, 2, 2, 2]).unwrap();
        assert_eq!(count_misclassified(&truth, &truth).unwrap(), 0);
        let relabeled = LabelImage::new(4, 2, vec![2, 2, 0, 0, 1, 1, 1, 1]).unwrap();
        assert_eq!(count_misclassified(&relabeled, &truth).unwrap(), 0);
        let off = LabelImage::new(4, 2, vec![2, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        assert_eq!(count_misclassified(&off, &truth).unwrap(), 1);
        let wrong = LabelImage::new(2, 4, truth.labels().to_vec()).unwrap();
        assert!(count_misclassified(&wrong, &truth).is_err());
    }

    #[test]
    fn seven_pixel_difference() {
        let truth =
            LabelImage::new(10, 10, (0..100).map(|i| usize::from(i >= 50)).collect()).unwrap();
        let mut labels = truth.labels().to_vec();
        for l in labels.iter_mut().take(7) {
            *l = 1;
        }
        let pred = LabelImage::new(10, 10, labels).unwrap();
        assert_eq!(count_misclassified(&pred, &truth).unwrap(), 7);
    }

    #[test]
    fn f_measure_examples() {
        let truth = Mask::new(4, 1, vec![true, true, false, false]).unwrap();
        let same = f_measure(&truth, &truth, 0.5).unwrap();
        assert_eq!((same.f, same.precision, same.recall), (1.0, 1.0, 1.0));
        let half = Mask::new(4, 1, vec![true, false, false, false]).unwrap();
        let m = f_measure(&half, &truth, 0.5).unwrap();
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 0.5);
        assert!((m.f - 2.0 / 3.0).abs() < 1e-15);
        let none = Mask::new(4, 1, vec![false; 4]).unwrap();
        let empty = f_measure(&none, &truth, 0.5).unwrap();
        assert_eq!((empty.precision, empty.recall), (1.0, 0.0));
        let disjoint = Mask::new(4, 1, vec![false, false, true, true]).unwrap();
        assert_eq!(f_measure(&disjoint, &truth, 0.5).unwrap().f, 0.0);
        assert!(f_measure(&truth, &truth, 1.0).is_err());
    }

    #[test]
    fn mask_and_label_gray_round_trips() {
        let mask = Mask::new(3, 1, vec![true, false, true]).unwrap();
        assert_eq!(Mask::from_gray(&mask.to_gray()), mask);
        let labels = LabelImage::new(3, 1, vec![2, 0, 1]).unwrap();
        assert_eq!(labels.to_gray().pixels(), &[255, 0, 127]);
        assert_eq!(LabelImage::from_gray(&labels.to_gray()), labels);
    }

    proptest! {
        #[test]
        fn f_identities(p in 0.0f64..=1.0, r in 0.0f64..=1.0, psi in 0.01f64..0.99) {
            let f = f_from(p, r, psi);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
            prop_assert!((f_from(p, p, psi) - p).abs() < 1e-12);
            prop_assert!((f_from(p, r, 0.5) - f_from(r, p, 0.5)).abs() < 1e-12);
        }

        #[test]
        fn smoothing_keeps_rows_feasible(
            w in 1usize..8,
            h in 1usize..8,
            seed in any::<u64>(),
            k in 2usize..4,
        ) {
            let mut g = GaussianStream::new(seed);
            let n = w * h;
            let mut t = Array2::zeros((n, k));
            let mut f = Array1::zeros(n);
            for i in 0..n {
                let raw: Vec<f64> = (0..=k).map(|_| g.next_standard().abs() + 1e-3).collect();
                let s: f64 = raw.iter().sum();
                for j in 0..k {
                    t[[i, j]] = raw[j] / s;
                }
                f[i] = raw[k] / s;
            }
            let (tb, fb) = smooth_memberships(t.view(), f.view(), w, h, 3).unwrap();
            for i in 0..n {
                prop_assert!((tb.row(i).sum() + fb[i] - 1.0).abs() < 1e-9);
            }
            let flat = Array2::from_elem((n, k), 1.0 / (k as f64 + 1.0));
            let flat_f = Array1::from_elem(n, 1.0 / (k as f64 + 1.0));
            let (same, _) = smooth_memberships(flat.view(), flat_f.view(), w, h, 5).unwrap();
            prop_assert!(same.iter().zip(flat.iter()).all(|(a, b)| (a - b).abs() < 1e-15));
        }

        #[test]
        fn misclassified_relabel_invariant(
            labels in prop::collection::vec((0usize..3, 0usize..3), 12),
            rot in 0usize..3,
        ) {
            let pred = LabelImage::new(4, 3, labels.iter().map(|l| l.0).collect()).unwrap();
            let truth = LabelImage::new(4, 3, labels.iter().map(|l| l.1).collect()).unwrap();
            let moved = LabelImage::new(4, 3, labels.iter().map(|l| (l.0 + rot) % 3).collect()).unwrap();
            prop_assert_eq!(
                count_misclassified(&pred, &truth).unwrap(),
                count_misclassified(&moved, &truth).unwrap()
            );
        }
    }
}
