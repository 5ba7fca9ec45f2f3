#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "ghostproj/io.hpp"

using namespace ghostproj;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() /
               ("ghostproj-io-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter()
    {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("image csv round-trips at full precision")
{
    TempDir dir;
    const Image img = phantom(17, 23, "moments:0.4:0.3");
    write_image_csv(dir.path / "img.csv", img);
    const Image back = read_image_csv(dir.path / "img.csv");
    CHECK(back.rows() == 17);
    CHECK(back.cols() == 23);
    CHECK(back.values() == img.values());
}

TEST_CASE("sequence csv round-trips with its header")
{
    TempDir dir;
    const std::vector<double> values = {0.25, -1.5, 3.0e-17, 12.0};
    write_sequence_csv(dir.path / "seq.csv", "correlation", values);
    CHECK(read_sequence_csv(dir.path / "seq.csv") == values);

    std::ifstream in(dir.path / "seq.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,correlation");
}

TEST_CASE("plan csv collapses identity index lists")
{
    TempDir dir;
    ExposurePlan dense;
    dense.weights = {0.1, 0.2, 0.3};
    write_plan_csv(dir.path / "dense.csv", dense);
    const ExposurePlan dense_back = read_plan_csv(dir.path / "dense.csv");
    CHECK(dense_back.indices.empty());
    CHECK(dense_back.weights == dense.weights);

    ExposurePlan sparse;
    sparse.indices = {2, 5, 9};
    sparse.weights = {0.1, 0.2, 0.3};
    write_plan_csv(dir.path / "sparse.csv", sparse);
    const ExposurePlan sparse_back = read_plan_csv(dir.path / "sparse.csv");
    CHECK(sparse_back.indices == sparse.indices);
    CHECK(sparse_back.weights == sparse.weights);
}

TEST_CASE("pgm export writes a valid 8-bit header and scale")
{
    TempDir dir;
    Image img(2, 2, {0.0, 1.0, 2.0, 3.0});
    const PgmScale scale = write_image_pgm(dir.path / "img.pgm", img);
    CHECK(scale.lo == 0.0);
    CHECK(scale.hi == 3.0);
    std::ifstream in(dir.path / "img.pgm", std::ios::binary);
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == 2);
    CHECK(h == 2);
    CHECK(maxval == 255);
    in.get(); // single whitespace after header
    CHECK(in.get() == 0);
    in.get();
    in.get();
    CHECK(in.get() == 255);
}

TEST_CASE("key=value files ignore comments and trim whitespace")
{
    TempDir dir;
    {
        std::ofstream out(dir.path / "conf.kv");
        out << "# leading comment\n"
            << "scheme = filtered\n"
            << "  count=12345  # trailing comment\n"
            << "empty_line_below\n\n";
    }
    const KeyValues kv = read_key_values(dir.path / "conf.kv");
    REQUIRE(find_value(kv, "scheme"));
    CHECK(*find_value(kv, "scheme") == "filtered");
    REQUIRE(find_value(kv, "count"));
    CHECK(*find_value(kv, "count") == "12345");
    CHECK(find_value(kv, "missing") == nullptr);

    write_key_values(dir.path / "echo.kv", kv);
    CHECK(read_key_values(dir.path / "echo.kv") == kv);
}

TEST_CASE("basis export and reimport preserve the masks")
{
    TempDir dir;
    BasisSpec spec;
    spec.rows = 6;
    spec.cols = 5;
    spec.count = 8;
    spec.master_seed = 3;
    RandomBasis basis(spec);
    export_basis(dir.path, basis, 8);

    const BasisSpec back = read_basis_meta(dir.path / "basis.meta");
    CHECK(back.rows == 6);
    CHECK(back.cols == 5);
    CHECK(back.count == 8);
    CHECK(back.master_seed == 3);

    const std::vector<Image> masks = import_masks_csv(dir.path);
    REQUIRE(masks.size() == 8);
    for (std::uint64_t k = 0; k < 8; ++k)
        CHECK(masks[k].values() == basis.mask(k));
}

TEST_CASE("missing files raise descriptive errors")
{
    CHECK_THROWS(read_image_csv("/nonexistent/image.csv"));
    CHECK_THROWS(read_key_values("/nonexistent/conf.kv"));
}
