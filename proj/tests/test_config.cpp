#include <string>

#include <doctest.h>

#include "collsim/config.hpp"
#include "collsim/errors.hpp"
#include "collsim/mask.hpp"
#include "test_util.hpp"

using namespace collsim;

namespace {

void check_tuple_equal(const TruncatedNormal& got, const TruncatedNormal& want) {
    CHECK(got.mean == want.mean);
    CHECK(got.stddev == want.stddev);
    CHECK(got.low == want.low);
    CHECK(got.high == want.high);
}

/// Expects fn() to throw ConfigError whose message contains `needle`.
template <typename Fn>
void expect_config_error(Fn&& fn, const std::string& needle) {
    try {
        fn();
        FAIL_CHECK("expected ConfigError containing \"" << needle << "\"");
    } catch (const ConfigError& e) {
        CAPTURE(e.what());
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("the annotated default config parses to exactly the built-in defaults") {
    const PipelineConfig got = parse_config(annotated_default_config(), "defaults");
    const PipelineConfig want; // struct defaults

    CHECK(got.seed == want.seed);
    CHECK(got.samples_per_input == want.samples_per_input);
    CHECK(got.inputs.empty());

    check_tuple_equal(got.geometry.centroid_x_frac, want.geometry.centroid_x_frac);
    check_tuple_equal(got.geometry.centroid_y_frac, want.geometry.centroid_y_frac);
    check_tuple_equal(got.geometry.width_frac, want.geometry.width_frac);
    check_tuple_equal(got.geometry.height_frac, want.geometry.height_frac);
    // Degrees in the file, radians in the struct; the defaults are defined
    // as multiples of kDegToRad so this comparison is exact.
    check_tuple_equal(got.geometry.rotation_rad, want.geometry.rotation_rad);
    check_tuple_equal(got.geometry.corner_jitter_frac, want.geometry.corner_jitter_frac);
    check_tuple_equal(got.geometry.damping, want.geometry.damping);

    check_tuple_equal(got.focal_sigma_px, want.focal_sigma_px);

    CHECK(got.scatter.exponent_alpha == want.scatter.exponent_alpha);
    CHECK(got.scatter.exponent_beta == want.scatter.exponent_beta);
    CHECK(got.scatter.magnitude_c == want.scatter.magnitude_c);
    CHECK(got.scatter.magnitude_c == ScatterConfig::kDefaultMagnitude);
    CHECK(got.scatter.kernel_sigma_frac == want.scatter.kernel_sigma_frac);
    CHECK(got.scatter.primary_intensity == want.scatter.primary_intensity);
    CHECK(got.scatter.band_low == want.scatter.band_low);
    CHECK(got.scatter.band_high == want.scatter.band_high);

    CHECK(got.noise.enabled == want.noise.enabled);
    CHECK(got.noise.photon_rate_lambda == want.noise.photon_rate_lambda);
    CHECK(got.noise.mode == want.noise.mode);

    CHECK(got.output.dir == want.output.dir);
    CHECK(got.output.bit_depth == want.output.bit_depth);
    CHECK(got.output.image_format == want.output.image_format);
}

TEST_CASE("comments and whitespace are tolerated, junk is not") {
    CHECK_NOTHROW(parse_config(annotated_default_config(), "t"));
    CHECK_THROWS_AS(parse_config("not json at all", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2, 3]", "t"), ConfigError);
}

TEST_CASE("strict key checking with dotted paths in messages") {
    std::string text = annotated_default_config();

    SUBCASE("unknown top-level key") {
        text.insert(text.rfind('}'), ", \"extra\": 1");
        expect_config_error([&] { parse_config(text, "cfg"); }, "unknown key \"extra\"");
    }
    SUBCASE("unknown nested key carries the path") {
        const auto pos = text.find("\"sigma_px\"");
        REQUIRE(pos != std::string::npos);
        std::string broken = text;
        broken.replace(pos, 10, "\"sigma_pixels\"");
        expect_config_error([&] { parse_config(broken, "cfg"); }, "cfg.focal_blur");
    }
    SUBCASE("missing key") {
        // Remove the scatter.band_high line entirely.
        const auto pos = text.find("\"band_high\"");
        REQUIRE(pos != std::string::npos);
        std::string broken = text;
        const auto prev_comma = broken.rfind(',', pos);
        const auto line_end = broken.find('\n', pos);
        broken.erase(prev_comma, line_end - prev_comma);
        expect_config_error([&] { parse_config(broken, "cfg"); }, "band_high");
    }
    SUBCASE("wrong type") {
        const auto pos = text.find("\"samples_per_input\": 1");
        REQUIRE(pos != std::string::npos);
        std::string broken = text;
        broken.replace(pos, 22, "\"samples_per_input\": \"1\"");
        expect_config_error([&] { parse_config(broken, "cfg"); }, "must be an integer");
    }
    SUBCASE("negative seed") {
        const auto pos = text.find("\"seed\": 20240915");
        REQUIRE(pos != std::string::npos);
        std::string broken = text;
        broken.replace(pos, 16, "\"seed\": -4");
        expect_config_error([&] { parse_config(broken, "cfg"); }, "non-negative");
    }
    SUBCASE("tuple with an unknown field") {
        const auto pos = text.find("\"mean\": 1.5");
        REQUIRE(pos != std::string::npos);
        std::string broken = text;
        broken.replace(pos, 11, "\"mu\": 1.5");
        expect_config_error([&] { parse_config(broken, "cfg"); }, "sigma_px");
    }
    SUBCASE("inputs must be an array of strings") {
        const auto pos = text.find("\"inputs\": []");
        REQUIRE(pos != std::string::npos);
        std::string broken = text;
        broken.replace(pos, 12, "\"inputs\": [42]");
        expect_config_error([&] { parse_config(broken, "cfg"); }, "inputs");
    }
}

TEST_CASE("config_to_json round-trips") {
    PipelineConfig cfg;
    cfg.seed = 99;
    cfg.samples_per_input = 3;
    cfg.inputs = {"a.pgm", "b.rawf"};
    cfg.geometry.rotation_rad = {0.1, 0.05, -0.2, 0.2};
    cfg.geometry.damping = {0.025, 0.004, 0.021, 0.035};
    cfg.scatter.magnitude_c = 0.0123;
    cfg.scatter.primary_intensity = 5000.0;
    cfg.noise.enabled = false;
    cfg.noise.mode = SigmaMode::kFullLambda;
    cfg.output.dir = "data";
    cfg.output.bit_depth = 8;
    cfg.output.image_format = "rawf";

    const PipelineConfig back = parse_config(config_to_json(cfg), "roundtrip");

    CHECK(back.seed == cfg.seed);
    CHECK(back.samples_per_input == cfg.samples_per_input);
    CHECK(back.inputs == cfg.inputs);
    check_tuple_equal(back.geometry.damping, cfg.geometry.damping);
    // Radians -> degrees -> radians may wobble by an ulp.
    CHECK(back.geometry.rotation_rad.mean ==
          doctest::Approx(cfg.geometry.rotation_rad.mean).epsilon(1e-12));
    CHECK(back.geometry.rotation_rad.stddev ==
          doctest::Approx(cfg.geometry.rotation_rad.stddev).epsilon(1e-12));
    CHECK(back.geometry.rotation_rad.low ==
          doctest::Approx(cfg.geometry.rotation_rad.low).epsilon(1e-12));
    CHECK(back.geometry.rotation_rad.high ==
          doctest::Approx(cfg.geometry.rotation_rad.high).epsilon(1e-12));
    CHECK(back.scatter.magnitude_c == cfg.scatter.magnitude_c);
    CHECK(back.scatter.primary_intensity == cfg.scatter.primary_intensity);
    CHECK(back.noise.enabled == cfg.noise.enabled);
    CHECK(back.noise.mode == cfg.noise.mode);
    CHECK(back.output.dir == cfg.output.dir);
    CHECK(back.output.bit_depth == cfg.output.bit_depth);
    CHECK(back.output.image_format == cfg.output.image_format);
}

TEST_CASE("validate() rejects out-of-range settings") {
    auto broken = [](auto mutate) {
        PipelineConfig cfg;
        mutate(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.samples_per_input = 0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.focal_sigma_px.low = 0.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.scatter.exponent_beta = -0.5; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.scatter.magnitude_c = -1.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.scatter.kernel_sigma_frac = 0.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.scatter.primary_intensity = -10.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.scatter.band_low = 0.03; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.noise.photon_rate_lambda = 0.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.output.bit_depth = 12; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.output.image_format = "png"; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.output.dir = ""; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](PipelineConfig& c) { c.geometry.damping.low = 0.0; }).validate(),
                    ConfigError);
    CHECK_NOTHROW(PipelineConfig{}.validate());
}

TEST_CASE("sigma mode names round-trip") {
    CHECK(sigma_mode_name(SigmaMode::kVarianceMatching) == "variance-matching");
    CHECK(sigma_mode_name(SigmaMode::kFullLambda) == "full-lambda");
    CHECK(sigma_mode_from_name("variance-matching") == SigmaMode::kVarianceMatching);
    CHECK(sigma_mode_from_name("full-lambda") == SigmaMode::kFullLambda);
    CHECK_THROWS_AS(sigma_mode_from_name("poisson"), ConfigError);
}

TEST_CASE("load_config reads files and reports them in errors") {
    testutil::TempDir dir("config_files");
    CHECK_THROWS_AS(load_config(dir.file("missing.jsonc")), IoError);

    const std::string path = dir.file("cfg.jsonc");
    testutil::write_file(path, annotated_default_config());
    const PipelineConfig cfg = load_config(path);
    CHECK(cfg.seed == PipelineConfig{}.seed);

    testutil::write_file(path, "{ broken");
    expect_config_error([&] { load_config(path); }, path);
}

} // TEST_SUITE
