#include <cmath>
#include <limits>

#include <doctest.h>

#include "collsim/errors.hpp"
#include "collsim/image.hpp"
#include "collsim/metrics.hpp"
#include "collsim/phantom.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace collsim;

namespace {

Image add_gaussian(const Image& img, double sigma, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    Image out = img;
    for (double& v : out.pixels) v = std::max(0.0, v + dist(engine));
    return out;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("extract_patch") {
    Image img(4, 3);
    for (std::size_t i = 0; i < img.size(); ++i) img.pixels[i] = double(i);
    const Image patch = extract_patch(img, {1, 1, 2, 2});
    CHECK(patch.pixels == std::vector<double>{5.0, 6.0, 9.0, 10.0});

    CHECK_THROWS_AS(extract_patch(img, {3, 0, 2, 2}), UsageError);
    CHECK_THROWS_AS(extract_patch(img, {-1, 0, 2, 2}), UsageError);
    CHECK_THROWS_AS(extract_patch(img, {0, 0, 0, 2}), UsageError);
    CHECK_THROWS_AS(extract_patch(img, {0, 2, 2, 2}), UsageError);
}

TEST_CASE("nmse closed forms") {
    const Image ref = testutil::random_image(8, 8, 41, 1.0, 100.0);
    CHECK(nmse(ref, ref) == 0.0);

    Image twice = ref;
    for (double& v : twice.pixels) v *= 2.0;
    // (ref - 2*ref)^2 = ref^2 termwise, same summation order: exactly 1.
    CHECK(nmse(ref, twice) == 1.0);

    Image zero(8, 8, 0.0);
    CHECK_THROWS_AS(nmse(zero, ref), UsageError);
    CHECK_THROWS_AS(nmse(ref, Image(4, 4, 1.0)), UsageError);
}

TEST_CASE("nmse matches a hand computation and is order-sensitive") {
    Image ref(3, 1);
    ref.pixels = {1.0, 2.0, 3.0};
    Image test(3, 1);
    test.pixels = {1.5, 2.0, 2.0};
    // mse = (0.25 + 0 + 1)/3; sum ref^2 is 14 one way and 10.25 the other.
    CHECK(nmse(ref, test) == doctest::Approx(1.25 / 14.0).epsilon(1e-12));
    CHECK(nmse(test, ref) == doctest::Approx(1.25 / 10.25).epsilon(1e-12));
    CHECK(nmse(ref, test) != nmse(test, ref));
}

TEST_CASE("ssim of an image with itself is exactly 1") {
    const Image a = testutil::random_image(16, 16, 42, 0.0, 255.0);
    CHECK(ssim(a, a) == 1.0);
    const Image b = disk_phantom(32, 1000.0);
    CHECK(ssim(b, b) == 1.0);
    const Image c(11, 11, 77.0);
    CHECK(ssim(c, c) == 1.0);
}

TEST_CASE("ssim of constant images matches the closed form") {
    const Image a(16, 16, 100.0);
    const Image b(16, 16, 120.0);
    // data_range resolves to max(reference) = 100.
    CHECK(ssim(a, b) == doctest::Approx(oracles::ssim_constants(100.0, 120.0, 0.01, 100.0))
                            .epsilon(1e-12));

    // Large luminance shifts collapse the score even with zero structure error.
    const Image far(16, 16, 1100.0);
    CHECK(ssim(a, far) == doctest::Approx(oracles::ssim_constants(100.0, 1100.0, 0.01, 100.0))
                              .epsilon(1e-12));
    CHECK(ssim(a, far) < 0.2);
}

TEST_CASE("ssim is symmetric when the data range is pinned") {
    const Image a = testutil::random_image(20, 20, 7, 0.0, 255.0);
    const Image b = add_gaussian(a, 12.0, 8);
    SsimOptions opt;
    opt.data_range = 255.0;
    CHECK(ssim(a, b, opt) == ssim(b, a, opt));
}

TEST_CASE("ssim decreases as distortion grows") {
    const Image ref = disk_phantom(64, 1000.0);
    SsimOptions opt;
    opt.data_range = 1000.0;
    double last = 1.0;
    for (double sigma : {5.0, 20.0, 80.0}) {
        const double score = ssim(ref, add_gaussian(ref, sigma, 99), opt);
        CHECK(score < last);
        CHECK(score > 0.0);
        last = score;
    }
}

TEST_CASE("ssim window preconditions") {
    const Image small(10, 10, 5.0);
    CHECK_THROWS_AS(ssim(small, small), UsageError);
    const Image tall(11, 10, 5.0);
    CHECK_THROWS_AS(ssim(tall, tall), UsageError);
    const Image ok(11, 11, 5.0);
    CHECK_NOTHROW(ssim(ok, ok));

    SsimOptions opt;
    opt.window = make_kernel_spec(0.5); // radius 2, window 5
    CHECK_NOTHROW(ssim(Image(5, 5, 1.0), Image(5, 5, 1.0), opt));

    // Zero data range cannot be resolved.
    const Image zeros(16, 16, 0.0);
    CHECK_THROWS_AS(ssim(zeros, zeros), UsageError);
}

TEST_CASE("psnr closed forms") {
    const Image ref = testutil::random_image(8, 8, 13, 1.0, 255.0);
    CHECK(psnr(ref, ref) == std::numeric_limits<double>::infinity());

    // MSE = data_range^2 gives exactly 0 dB.
    Image a(4, 4, 0.0);
    Image b(4, 4, 100.0);
    CHECK(psnr(a, b, 100.0) == 0.0);

    // MSE = 1 with range 255: 20*log10(255).
    Image c(4, 4, 10.0);
    Image d(4, 4, 11.0);
    CHECK(psnr(c, d, 255.0) == doctest::Approx(48.130803608679344).epsilon(1e-12));

    CHECK_THROWS_AS(psnr(Image(4, 4, 0.0), Image(4, 4, 0.0)), UsageError);
    CHECK_THROWS_AS(psnr(ref, Image(2, 2, 1.0)), UsageError);
}

TEST_CASE("psnr decreases monotonically with noise level") {
    const Image ref = gradient_phantom(64, 1000.0);
    double last = std::numeric_limits<double>::infinity();
    for (double sigma : {1.0, 2.0, 4.0, 8.0}) {
        const double db = psnr(ref, add_gaussian(ref, sigma, 1000), 1000.0);
        CHECK(db < last);
        last = db;
    }
    CHECK(last > 20.0); // sanity: still way above garbage level
}

TEST_CASE("compare_images bundles the three measures") {
    const Image ref = disk_phantom(32, 500.0);
    const Image test = add_gaussian(ref, 5.0, 3);
    SsimOptions opt;
    opt.data_range = 500.0;
    const MetricReport r = compare_images(ref, test, opt);
    CHECK(r.nmse == nmse(ref, test));
    CHECK(r.ssim == ssim(ref, test, opt));
    CHECK(r.psnr == psnr(ref, test, 500.0));
}

TEST_CASE("compare_patch equals compare_images on the extracted patch") {
    const Image ref = gradient_phantom(48, 800.0);
    const Image test = add_gaussian(ref, 4.0, 5);
    const PatchSpec patch{8, 12, 16, 20};
    SsimOptions opt;
    opt.data_range = 800.0;
    const MetricReport via_patch = compare_patch(ref, test, patch, opt);
    const MetricReport direct =
        compare_images(extract_patch(ref, patch), extract_patch(test, patch), opt);
    CHECK(via_patch.nmse == direct.nmse);
    CHECK(via_patch.ssim == direct.ssim);
    CHECK(via_patch.psnr == direct.psnr);

    CHECK_THROWS_AS(compare_patch(ref, test, {40, 40, 16, 16}, opt), UsageError);
}

} // TEST_SUITE
