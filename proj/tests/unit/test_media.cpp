// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "tevlab/media.hpp"

using namespace tevlab;

namespace {

BoundaryFrame frame_at_angle(double phi) {
  BoundaryFrame f;
  f.normal = {std::cos(phi), std::sin(phi)};
  f.tangent = {-std::sin(phi), std::cos(phi)};
  f.midpoint = f.normal;
  return f;
}

std::vector<BoundaryFrame> disk_frames() { return boundary_frames(mesh_unit_disk(3)); }

}  // namespace

TEST_SUITE("media") {
  TEST_CASE("identity media pass ellipticity with range [1,1]") {
    MediumPair p;
    p.Lambda = 2.0;
    const auto [mat, sig] = check_ellipticity(p, interior_samples(mesh_unit_disk(2)));
    CHECK(mat.pass);
    CHECK(sig.pass);
    CHECK(mat.min_value == 1.0);
    CHECK(mat.max_value == 1.0);
  }

  TEST_CASE("diag(3,1/3) violates the band by 1") {
    MediumPair p;
    p.A2 = SymMat2::diag(3.0, 1.0 / 3.0);
    p.Lambda = 2.0;
    const auto [mat, sig] = check_ellipticity(p, {{0.0, 0.0}});
    CHECK_FALSE(mat.pass);
    CHECK(mat.margin == doctest::Approx(-1.0));
    CHECK(mat.max_value == doctest::Approx(3.0));
    CHECK(sig.pass);
  }

  TEST_CASE("radial field peaks at 1.5 on the boundary") {
    MediumPair p;
    p.A1 = MatrixField(MatrixField::Radial{{SymMat2::identity(), 0.5 * SymMat2::identity()}});
    p.Lambda = 2.0;
    const auto [mat, sig] = check_ellipticity(p, interior_samples(mesh_unit_disk(3)));
    CHECK(mat.pass);
    CHECK(mat.max_value == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(std::hypot(mat.location.x, mat.location.y) <= 1.0 + 1e-12);
  }

  TEST_CASE("complementing form equals the determinant for any frame") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * M_PI);
    for (int i = 0; i < 1000; ++i) {
      const double a = u(rng), b = u(rng), c = u(rng);
      const SymMat2 A{a * a + b * b + 0.1, a * c + b * 0.3, c * c + 0.09 + 0.1};
      const BoundaryFrame f = frame_at_angle(ang(rng));
      CHECK(std::abs(complementing_form(A, f) - A.det()) <= 1e-12);
    }
  }

  TEST_CASE("complementing gap examples") {
    const BoundaryFrame f = frame_at_angle(0.7);
    CHECK(complementing_gap(SymMat2::identity(), 2.0 * SymMat2::identity(), f) == doctest::Approx(3.0));
    CHECK(complementing_gap(SymMat2::diag(2.0, 5.0), SymMat2::diag(2.0, 5.0), f) == doctest::Approx(0.0));
    CHECK(complementing_gap(SymMat2::identity(), SymMat2::diag(2.0, 0.5), f) == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("complementing gap is even in nu and xi") {
    const SymMat2 A1{2.0, 0.3, 1.0}, A2{1.0, -0.4, 3.0};
    BoundaryFrame f = frame_at_angle(1.1);
    const double g = complementing_gap(A1, A2, f);
    BoundaryFrame g1 = f, g2 = f;
    g1.tangent = -1.0 * f.tangent;
    g2.normal = -1.0 * f.normal;
    CHECK(complementing_gap(A1, A2, g1) == doctest::Approx(g).epsilon(1e-15));
    CHECK(complementing_gap(A1, A2, g2) == doctest::Approx(g).epsilon(1e-15));
  }

  TEST_CASE("check_complementing examples") {
    MediumPair p;
    p.A2 = 2.0 * SymMat2::identity();
    p.Lambda = 2.0;
    const auto r = check_complementing(p, disk_frames());
    CHECK(r.pass);
    CHECK(r.margin == doctest::Approx(2.5));

    MediumPair same;
    same.Lambda = 2.0;
    CHECK_FALSE(check_complementing(same, disk_frames()).pass);

    MediumPair equal_det;
    equal_det.A2 = SymMat2::diag(2.0, 0.5);
    equal_det.Lambda = 2.0;
    CHECK_FALSE(check_complementing(equal_det, disk_frames()).pass);
  }

  TEST_CASE("check_jump examples") {
    MediumPair p;
    p.Sigma2 = 4.0;
    p.Lambda = 2.0;
    const auto r = check_jump(p, disk_frames());
    CHECK(r.pass);
    CHECK(r.min_value == doctest::Approx(3.0));
    CHECK(r.max_value == doctest::Approx(3.0));

    MediumPair same;
    CHECK_FALSE(check_jump(same, disk_frames()).pass);

    MediumPair cancel;
    cancel.A2 = 2.0 * SymMat2::identity();
    cancel.Sigma2 = 0.5;
    cancel.Lambda = 2.0;
    const auto c = check_jump(cancel, disk_frames());
    CHECK_FALSE(c.pass);
    CHECK(c.min_value == doctest::Approx(0.0));
  }

  TEST_CASE("field kinds evaluate consistently") {
    const ScalarField c = 2.5;
    CHECK(c.kind() == "constant");
    CHECK(c({0.3, 0.4}) == 2.5);
    const ScalarField r(ScalarField::Radial{{1.0, 2.0}});
    CHECK(r.kind() == "radial");
    CHECK(r({0.3, 0.4}) == doctest::Approx(1.5));
    auto mesh = std::make_shared<const TriMesh>(mesh_rectangle(2, 2, {0, 0}, {1, 1}));
    std::vector<double> vals;
    for (const auto& v : mesh->vertices()) vals.push_back(1.0 + 2.0 * v.x - v.y);
    const ScalarField t(ScalarField::Table{mesh, vals});
    CHECK(t.kind() == "table");
    CHECK(t({0.3, 0.7}) == doctest::Approx(1.0 + 0.6 - 0.7));
  }

  TEST_CASE("empty sample sets are refused") {
    MediumPair p;
    CHECK_THROWS(check_ellipticity(p, {}));
    CHECK_THROWS(check_complementing(p, {}));
  }
}
