//! Element-level worker pool with index-ordered reduction.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use oscquad_core::geometry::Mesh;
use oscquad_core::integrand::PulledBack;
use oscquad_core::levin2d::Levin2d;
use oscquad_core::oracle::oracle_reference;
use oscquad_core::{
    Complex64, Error, Levin2dConfig, OracleConfig, OscillatoryIntegrand, QuadratureResult,
};

/// Worker count from `OSC_THREADS`, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("OSC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

/// Evaluates `f(0..n)` on up to `threads` workers; results keep index order.
pub fn map_indexed<R: Send>(n: usize, threads: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let slots: Vec<Mutex<Option<R>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = f(i);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every index evaluated"))
        .collect()
}

/// Parallel counterpart of [`oscquad_core::integrate_mesh`]; the lowest
/// failing element index wins, and the sum is bitwise independent of `threads`.
pub fn integrate_mesh<I>(
    mesh: &Mesh,
    osc: &I,
    cfg: &Levin2dConfig,
    threads: usize,
) -> Result<QuadratureResult, Error>
where
    I: OscillatoryIntegrand + Sync + ?Sized,
{
    let solver = Levin2d::new(*cfg)?;
    let parts = map_indexed(mesh.len(), threads, |i| {
        solver.integrate_element(&mesh.elements()[i], osc, i)
    });
    let parts: Vec<QuadratureResult> = parts.into_iter().collect::<Result<_, _>>()?;
    Ok(QuadratureResult::reduce(&parts))
}

/// Parallel counterpart of [`oscquad_core::oracle::oracle_2d`].
pub fn oracle_2d<I>(
    mesh: &Mesh,
    osc: &I,
    cfg: &OracleConfig,
    threads: usize,
) -> Result<Complex64, Error>
where
    I: OscillatoryIntegrand + Sync + ?Sized,
{
    let parts = map_indexed(mesh.len(), threads, |i| {
        let el = &mesh.elements()[i];
        PulledBack::new(el, osc, i)
            .and_then(|pb| oracle_reference(&pb, cfg))
            .map_err(|e| e.in_element(i))
    });
    let mut total = Complex64::new(0.0, 0.0);
    for p in parts {
        total += p?;
    }
    Ok(total)
}
