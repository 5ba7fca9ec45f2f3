#include <doctest.h>

#include <filesystem>
#include <unistd.h>

#include "ghostproj/experiment.hpp"
#include "ghostproj/parallel.hpp"

using namespace ghostproj;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int c = 0;
        path = fs::temp_directory_path() /
               ("ghostproj-exp-" + std::to_string(::getpid()) + "-" + std::to_string(c++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config round-trips through key=value form")
{
    ExperimentConfig c;
    c.scheme = "filtered-poisson";
    c.count = 123456;
    c.lambda = 1000.0;
    c.seed = 42;
    c.cutoff_x = 0.7;
    c.phantom_contrast = "moments:0.5:0.5";
    const ExperimentConfig back = ExperimentConfig::from_key_values(c.to_key_values());
    CHECK(back.scheme == c.scheme);
    CHECK(back.count == c.count);
    CHECK(back.lambda == c.lambda);
    CHECK(back.seed == c.seed);
    CHECK(back.cutoff_x == c.cutoff_x);
    CHECK(back.phantom_contrast == c.phantom_contrast);
}

TEST_CASE("config validation catches bad combinations")
{
    ExperimentConfig c;
    c.scheme = "no-such-scheme";
    c.count = 100;
    CHECK_THROWS(c.validate());
    c.scheme = "weighted";
    c.count = 0;
    CHECK_THROWS(c.validate());
    c.count = 100;
    c.scheme = "filtered-poisson"; // needs lambda
    CHECK_THROWS(c.validate());
    c.lambda = 1000.0;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("a run writes the full artifact set and a manifest that reruns")
{
    TempDir dir;
    ExperimentConfig c;
    c.scheme = "filtered";
    c.count = 20000;
    c.seed = 7;
    c.phantom_contrast = "moments:0.5:0.376759";
    c.out_dir = dir.path / "a";
    const RunResult res = run_experiment(c);

    for (const char* name : {"projection.csv", "projection.pgm", "plan.csv", "report.kv",
                             "residual_histogram.csv", "manifest.kv", "selection.kv"})
        CHECK(fs::exists(dir.path / "a" / name));
    CHECK(res.simulated_snr == doctest::Approx(res.predicted_snr).epsilon(0.15));

    // The manifest alone reproduces the run bit-exactly.
    ExperimentConfig again =
        ExperimentConfig::from_key_values(read_key_values(dir.path / "a" / "manifest.kv"));
    again.out_dir = dir.path / "b";
    const RunResult res2 = run_experiment(again);
    CHECK(res2.simulated_snr == res.simulated_snr);
    CHECK(read_image_csv(dir.path / "a" / "projection.csv").values() ==
          read_image_csv(dir.path / "b" / "projection.csv").values());
}

TEST_CASE("runs are bit-identical across thread counts")
{
    TempDir dir;
    ExperimentConfig c;
    c.scheme = "weighted";
    c.count = 20000;
    c.seed = 3;
    c.out_dir = dir.path / "t1";
    c.threads = 1;
    run_experiment(c);
    c.out_dir = dir.path / "t4";
    c.threads = 4;
    run_experiment(c);
    set_thread_count(0);
    CHECK(read_image_csv(dir.path / "t1" / "projection.csv").values() ==
          read_image_csv(dir.path / "t4" / "projection.csv").values());
}

TEST_CASE("weighted photocopy equals the weighted projection")
{
    // The bucket signal is the normalized mask inner product, so planning
    // from buckets must reproduce the direct weighted plan.
    BasisSpec spec;
    spec.rows = 20;
    spec.cols = 20;
    spec.count = 5000;
    spec.master_seed = 11;
    RandomBasis basis(spec);
    const Image object = phantom(20, 20);

    NoiseModel noiseless{0.0, 0.0, 0};
    const PhotocopyResult pc = photocopy(basis, object, noiseless, SchemeTag::weighted);
    const auto [plan, proj] = weighted_projection(basis, object);
    REQUIRE(pc.plan.weights.size() == plan.weights.size());
    for (std::size_t k = 0; k < plan.weights.size(); ++k)
        CHECK(pc.plan.weights[k] == doctest::Approx(plan.weights[k]).epsilon(1e-9));
    CHECK(pc.predicted_snr ==
          doctest::Approx(weighted_snr(basis.moments(), object, spec.count)).epsilon(1e-12));
}

TEST_CASE("filtered photocopy keeps the top-correlated masks")
{
    BasisSpec spec;
    spec.rows = 20;
    spec.cols = 20;
    spec.count = 20000;
    spec.master_seed = 11;
    RandomBasis basis(spec);
    const Image object = phantom(20, 20);
    NoiseModel noiseless{0.0, 0.0, 0};
    const PhotocopyResult pc = photocopy(basis, object, noiseless, SchemeTag::filtered);
    CHECK(pc.plan.indices.size() == pc.plan.weights.size());
    CHECK(pc.plan.indices.size() < 20000);
    CHECK(pc.report.snr_global == doctest::Approx(pc.predicted_snr).epsilon(0.2));

    // Objects outside [0,1] are not photocopyable.
    CHECK_THROWS(photocopy(basis, phantom(20, 20, "zero-centered"), noiseless,
                           SchemeTag::filtered));
}
