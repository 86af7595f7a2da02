//! Integrate the top form of the theta and dumbbell graphs over
//! `[eps, ∞)^3` for the toy algebra, in closed form and by quadrature.

use cyheat::forms::{FormContext, Integration, Tensor};
use cyheat::linalg::ONE;
use cyheat::ribbon::zoo;
use cyheat::{builtins, Length, Spectral};

fn main() {
    let sp = Spectral::new(&builtins::toy()).unwrap();
    for (name, g) in [("theta", zoo::theta_planar()), ("dumbbell", zoo::dumbbell())] {
        let ctx = FormContext::with_default(&sp, g.clone());
        let l = vec![Length::Finite(0.0); g.num_edges()];
        let f = Tensor::scalar(sp.dim(), ONE);
        for eps in [0.5, 1.0] {
            let closed = ctx.integrate_top(eps, &l, &f, Integration::Closed).unwrap();
            let quad = ctx.integrate_top(eps, &l, &f, Integration::Quadrature { rel_tol: 1e-5 }).unwrap();
            println!("{name} eps={eps}: closed {:.10}, quadrature {:.10}", closed.data[0].re, quad.data[0].re);
        }
    }
}
