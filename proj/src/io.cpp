#include "ghostproj/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ghostproj {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

} // namespace

void write_image_csv(const std::filesystem::path& path, const Image& image)
{
    auto out = open_out(path);
    for (int i = 0; i < image.rows(); ++i) {
        for (int j = 0; j < image.cols(); ++j) {
            if (j)
                out << ',';
            out << image(i, j);
        }
        out << '\n';
    }
}

Image read_image_csv(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::vector<double> values;
    std::string line;
    int rows = 0, cols = -1;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string cell;
        int c = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++c;
        }
        if (cols < 0)
            cols = c;
        else if (c != cols)
            throw std::runtime_error("ragged CSV image: " + path.string());
        ++rows;
    }
    if (rows == 0 || cols <= 0)
        throw std::runtime_error("empty CSV image: " + path.string());
    return Image(rows, cols, std::move(values));
}

void write_sequence_csv(const std::filesystem::path& path, const std::string& value_name,
                        const std::vector<double>& values)
{
    auto out = open_out(path);
    out << "k," << value_name << '\n';
    for (std::size_t k = 0; k < values.size(); ++k)
        out << k << ',' << values[k] << '\n';
}

std::vector<double> read_sequence_csv(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty sequence CSV: " + path.string());
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("bad sequence row: " + line);
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return values;
}

void write_plan_csv(const std::filesystem::path& path, const ExposurePlan& plan)
{
    auto out = open_out(path);
    out << "k,weight\n";
    for (std::size_t e = 0; e < plan.weights.size(); ++e)
        out << (plan.indices.empty() ? e : plan.indices[e]) << ',' << plan.weights[e]
            << '\n';
}

ExposurePlan read_plan_csv(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty plan CSV: " + path.string());
    ExposurePlan plan;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("bad plan row: " + line);
        plan.indices.push_back(std::stoull(line.substr(0, comma)));
        plan.weights.push_back(std::stod(line.substr(comma + 1)));
    }
    // Identity index lists collapse to the implicit form.
    bool identity = true;
    for (std::size_t e = 0; e < plan.indices.size(); ++e)
        if (plan.indices[e] != e) {
            identity = false;
            break;
        }
    if (identity)
        plan.indices.clear();
    return plan;
}

PgmScale write_image_pgm(const std::filesystem::path& path, const Image& image)
{
    PgmScale scale;
    scale.lo = *std::min_element(image.values().begin(), image.values().end());
    scale.hi = *std::max_element(image.values().begin(), image.values().end());
    const double span = scale.hi > scale.lo ? scale.hi - scale.lo : 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    for (double v : image.values()) {
        const double t = (v - scale.lo) / span;
        out.put(static_cast<char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0))));
    }
    return scale;
}

KeyValues read_key_values(const std::filesystem::path& path)
{
    auto in = open_in(path);
    KeyValues kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty())
            kv.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& values)
{
    auto out = open_out(path);
    for (const auto& [k, v] : values)
        out << k << " = " << v << '\n';
}

const std::string* find_value(const KeyValues& values, const std::string& key)
{
    for (const auto& [k, v] : values)
        if (k == key)
            return &v;
    return nullptr;
}

void write_selection(const std::filesystem::path& summary_path,
                     const std::filesystem::path& index_path, const FilterSelection& sel)
{
    KeyValues kv;
    auto num = [](double v) {
        std::ostringstream ss;
        ss << std::setprecision(17) << v;
        return ss.str();
    };
    kv.emplace_back("cutoff", num(sel.cutoff));
    kv.emplace_back("x", num(sel.x));
    kv.emplace_back("kept_fraction", num(sel.kept_fraction));
    kv.emplace_back("n_kept", std::to_string(sel.n_kept));
    kv.emplace_back("kept_mean_empirical", num(sel.kept_mean_empirical));
    kv.emplace_back("kept_mean_analytic", num(sel.kept_mean_analytic));
    kv.emplace_back("gamma", num(sel.gamma));
    kv.emplace_back("gamma_analytic", num(sel.gamma_analytic));
    kv.emplace_back("xi", num(sel.xi));
    write_key_values(summary_path, kv);

    auto out = open_out(index_path);
    for (std::uint64_t k : sel.kept_indices)
        out << k << '\n';
}

void export_basis(const std::filesystem::path& dir, const RandomBasis& basis,
                  std::uint64_t count, bool as_pgm)
{
    std::filesystem::create_directories(dir);
    const auto& spec = basis.spec();
    count = std::min<std::uint64_t>(count, spec.count);

    KeyValues kv;
    kv.emplace_back("rows", std::to_string(spec.rows));
    kv.emplace_back("cols", std::to_string(spec.cols));
    kv.emplace_back("count", std::to_string(spec.count));
    kv.emplace_back("exported", std::to_string(count));
    kv.emplace_back("distribution", to_string(spec.distribution));
    kv.emplace_back("mu", std::to_string(spec.mu));
    kv.emplace_back("sigma", std::to_string(spec.sigma));
    kv.emplace_back("master_seed", std::to_string(spec.master_seed));
    write_key_values(dir / "basis.meta", kv);

    for (std::uint64_t k = 0; k < count; ++k) {
        std::ostringstream name;
        name << "mask_" << std::setfill('0') << std::setw(6) << k
             << (as_pgm ? ".pgm" : ".csv");
        const Image mask(spec.rows, spec.cols, basis.mask(k));
        if (as_pgm)
            write_image_pgm(dir / name.str(), mask);
        else
            write_image_csv(dir / name.str(), mask);
    }
}

BasisSpec read_basis_meta(const std::filesystem::path& meta_path)
{
    const KeyValues kv = read_key_values(meta_path);
    auto need = [&](const std::string& key) {
        const std::string* v = find_value(kv, key);
        if (!v)
            throw std::runtime_error("basis.meta missing key: " + key);
        return *v;
    };
    BasisSpec spec;
    spec.rows = std::stoi(need("rows"));
    spec.cols = std::stoi(need("cols"));
    spec.count = std::stoull(need("count"));
    spec.distribution = distribution_from_string(need("distribution"));
    spec.mu = std::stod(need("mu"));
    spec.sigma = std::stod(need("sigma"));
    spec.master_seed = std::stoull(need("master_seed"));
    return spec;
}

std::vector<Image> import_masks_csv(const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("mask_", 0) == 0 && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Image> masks;
    masks.reserve(files.size());
    for (const auto& f : files)
        masks.push_back(read_image_csv(f));
    return masks;
}

} // namespace ghostproj
