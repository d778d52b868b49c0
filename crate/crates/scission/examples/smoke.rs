use scission::builders;
use scission::complex::validate;
use scission::k0;

fn main() {
    let t0 = std::time::Instant::now();
    let cx = builders::interval_line(1, 4).unwrap();
    println!("interval(1,4): {} objects, {} hmors, built in {:?}",
        cx.object_count(), cx.hmor_count(), t0.elapsed());
    let top = cx.object_by_name("[0,4]").unwrap();
    println!("covers of [0,4]: {}", cx.covers_of(top).len());
    let t1 = std::time::Instant::now();
    let rep = validate(&cx);
    println!("validate: {} in {:?}", rep.passed(), t1.elapsed());
    let t2 = std::time::Instant::now();
    let k = k0::k0(&cx);
    println!("k0: rank {} torsion {:?} ({} relations) in {:?}",
        k.group.rank, k.group.invariant_factors, k.presentation.relations.rows, t2.elapsed());

    let t3 = std::time::Instant::now();
    let q = builders::quadratic(-1, 25).unwrap();
    println!("quadratic(-1,25): {} objects in {:?}", q.complex.object_count(), t3.elapsed());
    let rep = validate(&q.complex);
    println!("validate: {}", rep.passed());
    let kq = k0::k0(&q.complex);
    println!("k0: rank {} torsion {:?}", kq.group.rank, kq.group.invariant_factors);

    let t4 = std::time::Instant::now();
    let q5 = builders::quadratic(-5, 25).unwrap();
    println!("quadratic(-5,25): {} objects in {:?}", q5.complex.object_count(), t4.elapsed());
    println!("validate: {}", validate(&q5.complex).passed());
    let k5 = k0::k0(&q5.complex);
    println!("k0: rank {} torsion {:?}", k5.group.rank, k5.group.invariant_factors);
}
