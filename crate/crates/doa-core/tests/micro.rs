use std::time::Instant;

#[test]
#[ignore]
fn micro_costs() {
    // eval cost: 15-term scaled objective
    let sin_t: Vec<f64> = (0..15).map(|i| (i as f64 * 0.41).sin()).collect();
    let cos_t: Vec<f64> = (0..15).map(|i| (i as f64 * 0.41).cos()).collect();
    let kappa = 10.0;
    let reps = 1_000_000u64;
    let t0 = Instant::now();
    let mut acc = 0.0;
    for i in 0..reps {
        let phi = i as f64 * 1e-6;
        let (sp, cp) = phi.sin_cos();
        let mut value = 0.0;
        let mut grad = 0.0;
        let mut hess = 0.0;
        for (&sn, &cn) in sin_t.iter().zip(&cos_t) {
            let c = cp * cn + sp * sn;
            let s = sp * cn - cp * sn;
            let e = (kappa * (c - 1.0)).exp();
            value += e;
            grad -= s * e;
            hess += e * (kappa * s * s - c);
        }
        acc += value + grad + hess;
    }
    let per_eval = t0.elapsed().as_secs_f64() / reps as f64;
    println!("eval_scaled(15 terms): {:.1} ns  (acc {acc:.3})", per_eval * 1e9);

    // row update + argmax on 512 bins
    let kernel: Vec<f64> = (0..1024).map(|i| ((i % 512) as f64 * 0.01).cos().exp()).collect();
    let mut smoothed = vec![1.0f64; 512];
    let reps = 1_000_000u64;
    let t0 = Instant::now();
    let mut accu = 0usize;
    for i in 0..reps {
        let b_add = (i % 497) as usize;
        let b_sub = (i % 461) as usize;
        let add = &kernel[512 - b_add..1024 - b_add];
        let sub = &kernel[512 - b_sub..1024 - b_sub];
        for ((d, a), s) in smoothed.iter_mut().zip(add).zip(sub) {
            *d += a - s;
        }
        let mut idx = 0;
        let mut max = smoothed[0];
        for (j, &v) in smoothed.iter().enumerate().skip(1) {
            if v > max { max = v; idx = j; }
        }
        accu += idx;
    }
    let per = t0.elapsed().as_secs_f64() / reps as f64;
    println!("swap_row+argmax(512): {:.1} ns  (acc {accu})", per * 1e9);
}
