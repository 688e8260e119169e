#include "ptbox/boundary.hpp"

#include "ptbox/random.hpp"

#include <doctest.h>

using namespace ptbox;

TEST_CASE("pt_pair maps (ell1, ell2) to (ell1 + i ell2, -ell1 + i ell2)") {
    auto p = pt_pair({0.0, 0.0});
    CHECK(p.lambda1 == cd(0.0, 0.0));
    CHECK(p.lambda2 == cd(0.0, 0.0));
    p = pt_pair({1.0, 0.0});
    CHECK(p.lambda1 == cd(1.0, 0.0));
    CHECK(p.lambda2 == cd(-1.0, 0.0));
    p = pt_pair({0.0, 0.1});
    CHECK(p.lambda1 == cd(0.0, 0.1));
    CHECK(p.lambda2 == cd(0.0, 0.1));
}

TEST_CASE("adjoint_pair conjugates both entries") {
    auto a = adjoint_pair({cd(0.0, 0.1), cd(0.0, 0.1)});
    CHECK(a.lambda1 == cd(0.0, -0.1));
    CHECK(a.lambda2 == cd(0.0, -0.1));
    a = adjoint_pair({cd(1.0, 2.0), cd(3.0, 0.0)});
    CHECK(a.lambda1 == cd(1.0, -2.0));
    CHECK(a.lambda2 == cd(3.0, 0.0));
    a = adjoint_pair({});
    CHECK(a.lambda1 == cd(0.0, 0.0));
}

TEST_CASE("classify") {
    CHECK(classify({2.0, 5.0}) == BoundaryClass::hermitian);
    CHECK(classify({cd(0.0, 0.1), cd(0.0, 0.1)}) == BoundaryClass::pt_symmetric);
    CHECK(classify({1.0, -1.0}) == BoundaryClass::both);
    CHECK(classify({cd(1.0, 1.0), cd(2.0, 0.0)}) == BoundaryClass::neither);
    CHECK(to_string(BoundaryClass::pt_symmetric) == "PTSymmetric");
}

TEST_CASE("classify uses an absolute tolerance") {
    CHECK(classify({cd(2.0, 5e-13), 5.0}) == BoundaryClass::hermitian);
    CHECK(classify({cd(2.0, 5e-12), 5.0}) == BoundaryClass::neither);
    CHECK(classify({cd(1e6, 0.0), cd(-1e6 + 1e-9, 0.0)}) == BoundaryClass::hermitian);
}

TEST_CASE("ring_is_pt") {
    auto r = ring_is_pt({1.0});
    CHECK(r.pt);
    CHECK(r.hermitian);
    r = ring_is_pt({2.5});
    CHECK(r.pt);
    CHECK_FALSE(r.hermitian);
    r = ring_is_pt({cd(0.0, 1.0)});
    CHECK_FALSE(r.pt);
    CHECK(r.hermitian);
    r = ring_is_pt({0.0});
    CHECK(r.pt);
    CHECK_FALSE(r.hermitian);
}

TEST_CASE("properties over random parameters") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const double l1 = rng.uniform(-3.0, 3.0);
        const double l2 = i % 10 == 0 ? 0.0 : rng.uniform(-3.0, 3.0);
        const BoundaryPair p = pt_pair({l1, l2});
        const BoundaryClass c = classify(p);
        CHECK((c == BoundaryClass::pt_symmetric || c == BoundaryClass::both));
        CHECK((c == BoundaryClass::both) == (l2 == 0.0));

        const BoundaryPair q{cd(rng.normal(), i % 3 ? rng.normal() : 0.0), cd(rng.normal(), i % 2 ? rng.normal() : 0.0)};
        const BoundaryPair back = adjoint_pair(adjoint_pair(q));
        CHECK(back.lambda1 == q.lambda1);
        CHECK(back.lambda2 == q.lambda2);
        const BoundaryPair adj = adjoint_pair(q);
        const bool herm = classify(q) == BoundaryClass::hermitian || classify(q) == BoundaryClass::both;
        const bool herm_adj = classify(adj) == BoundaryClass::hermitian || classify(adj) == BoundaryClass::both;
        CHECK(herm == (herm_adj && adj.lambda1 == q.lambda1 && adj.lambda2 == q.lambda2));
    }
}
