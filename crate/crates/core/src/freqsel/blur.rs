use ndarray::Array2;

/// Sampled Gaussian of half-width `radius`, normalized to unit sum.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-r..=r).map(|i| (-((i * i) as f64) / denom).exp()).collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|x| *x /= sum);
    k
}

/// Separable Gaussian smoothing with replicated borders.
pub fn gaussian_blur(map: &Array2<f64>, sigma: f64, radius: usize) -> Array2<f64> {
    let kernel = gaussian_kernel(sigma, radius);
    let (h, w) = map.dim();
    let src = map.as_standard_layout();
    let src = src.as_slice().expect("standard layout");

    // Horizontal pass over rows padded by edge replication.
    let mut tmp = vec![0.0; h * w];
    let mut pad = vec![0.0; w + 2 * radius];
    for u in 0..h {
        let row = &src[u * w..(u + 1) * w];
        pad[..radius].fill(row[0]);
        pad[radius..radius + w].copy_from_slice(row);
        pad[radius + w..].fill(row[w - 1]);
        for (v, out) in tmp[u * w..(u + 1) * w].iter_mut().enumerate() {
            let mut acc = 0.0;
            for (g, x) in kernel.iter().zip(&pad[v..]) {
                acc += g * x;
            }
            *out = acc;
        }
    }

    // Vertical pass, one output row at a time.
    let mut out = vec![0.0; h * w];
    for u in 0..h {
        let dst = &mut out[u * w..(u + 1) * w];
        for (t, &g) in kernel.iter().enumerate() {
            let su = (u + t).saturating_sub(radius).min(h - 1);
            for (d, x) in dst.iter_mut().zip(&tmp[su * w..(su + 1) * w]) {
                *d += g * x;
            }
        }
    }
    Array2::from_shape_vec((h, w), out).expect("blur keeps the map shape")
}
