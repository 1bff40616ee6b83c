#include <doctest.h>

#include <cmath>
#include <random>

#include "lrfcal/lrf.hpp"
#include "lrfcal/rng.hpp"

using namespace lrfcal;

TEST_CASE("extrinsic_to_transform basic cases") {
    const Transform ident = extrinsic_to_transform(ExtrinsicParams());
    CHECK((ident.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    // Reference extrinsic: half turn about z with the offset position.
    const ExtrinsicParams ext(AxisAngle(Vec3(0, 0, 1), M_PI), Vec3(-0.1275, -0.033, 0.1015));
    const Transform t = extrinsic_to_transform(ext);
    Mat3 expected;
    expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
    CHECK((t.rotation() - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((t.translation() - Vec3(-0.1275, -0.033, 0.1015)).norm() < 1e-15);

    const ExtrinsicParams back = transform_to_extrinsic(t);
    CHECK(back.rotation.angle == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK((back.rotation.axis - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK((back.position - ext.position).norm() < 1e-15);
}

TEST_CASE("extrinsic round trip over random transforms") {
    auto rng = make_rng(31);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, M_PI - 1e-6);
    for (int i = 0; i < 100; ++i) {
        Vec3 axis(unit(rng), unit(rng), unit(rng));
        while (axis.norm() < 1e-3) {
            axis = Vec3(unit(rng), unit(rng), unit(rng));
        }
        const ExtrinsicParams ext(AxisAngle(axis.normalized(), ang(rng)),
                                  Vec3(unit(rng), unit(rng), unit(rng)));
        const Transform t = extrinsic_to_transform(ext);
        const Transform t2 = extrinsic_to_transform(transform_to_extrinsic(t));
        CHECK((t.matrix() - t2.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
}
