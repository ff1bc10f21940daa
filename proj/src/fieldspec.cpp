#include "kslg/fieldspec.hpp"

#include "kslg/io.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace kslg {

namespace {

struct KindInfo {
    FieldSpec::Kind kind;
    const char* name;
    std::size_t min_params;
    std::size_t max_params;
};

constexpr KindInfo kKinds[] = {
    {FieldSpec::Kind::constant, "constant", 1, 1},   {FieldSpec::Kind::gaussian, "gaussian", 2, 5},
    {FieldSpec::Kind::cosine, "cosine", 3, 4},       {FieldSpec::Kind::random, "random", 2, 2},
    {FieldSpec::Kind::prototype, "prototype", 2, 2}, {FieldSpec::Kind::file, "file", 0, 0},
};

const KindInfo& info_for(FieldSpec::Kind k) {
    for (const auto& i : kKinds)
        if (i.kind == k) return i;
    throw std::logic_error("unknown field kind");
}

double parse_number(const std::string& word) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(word, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != word.size() || !std::isfinite(x)) throw FieldSpecError("'" + word + "' is not a finite number");
    return x;
}

}  // namespace

FieldSpec FieldSpec::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string head;
    if (!(in >> head)) throw FieldSpecError("empty field description");
    const KindInfo* info = nullptr;
    for (const auto& i : kKinds)
        if (head == i.name) info = &i;
    if (!info) {
        throw FieldSpecError("unknown field kind '" + head +
                             "' (expected constant, gaussian, cosine, random, prototype or file)");
    }
    FieldSpec spec;
    spec.kind = info->kind;
    if (spec.kind == Kind::file) {
        if (!(in >> spec.path)) throw FieldSpecError("file needs a path");
        std::string extra;
        if (in >> extra) throw FieldSpecError("file takes exactly one path");
        return spec;
    }
    std::string word;
    while (in >> word) spec.params.push_back(parse_number(word));
    if (spec.params.size() < info->min_params || spec.params.size() > info->max_params) {
        std::ostringstream m;
        m << head << " takes " << info->min_params;
        if (info->max_params != info->min_params) m << " to " << info->max_params;
        m << " numbers, got " << spec.params.size();
        throw FieldSpecError(m.str());
    }
    if (spec.kind == Kind::gaussian && !(spec.params[1] > 0.0)) throw FieldSpecError("gaussian width must be positive");
    if (spec.kind == Kind::gaussian && spec.params.size() == 3) throw FieldSpecError("gaussian center needs both x0 and y0");
    if (spec.kind == Kind::random && !(spec.params[0] <= spec.params[1])) throw FieldSpecError("random needs lo <= hi");
    if (spec.kind == Kind::prototype) {
        if (!(spec.params[0] > 0.0)) throw FieldSpecError("prototype mu1 must be positive");
        if (!(spec.params[1] >= 0.0)) throw FieldSpecError("prototype alpha must be nonnegative");
    }
    if (spec.kind == Kind::cosine) {
        for (std::size_t k = 2; k < spec.params.size(); ++k) {
            if (spec.params[k] != std::floor(spec.params[k]) || spec.params[k] < 0.0)
                throw FieldSpecError("cosine mode numbers must be nonnegative integers");
        }
    }
    return spec;
}

std::string FieldSpec::str() const {
    std::string s = info_for(kind).name;
    if (kind == Kind::file) return s + " " + path;
    for (double p : params) s += " " + io::format_double(p);
    return s;
}

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

Field realize(const FieldSpec& spec, const GridSpec& grid, std::uint64_t seed) {
    const auto& p = spec.params;
    switch (spec.kind) {
        case FieldSpec::Kind::constant:
            return Field(grid, p[0]);
        case FieldSpec::Kind::gaussian: {
            const double x0 = p.size() >= 4 ? p[2] : 0.0;
            const double y0 = p.size() >= 4 ? p[3] : 0.0;
            const double base = p.size() == 5 ? p[4] : 0.0;
            const double two_w2 = 2.0 * p[1] * p[1];
            return sample(grid, [&](double x, double y) {
                const double dy = grid.dim == 2 ? y - y0 : 0.0;
                return base + p[0] * std::exp(-((x - x0) * (x - x0) + dy * dy) / two_w2);
            });
        }
        case FieldSpec::Kind::cosine: {
            const double kx = p[2];
            const double ky = p.size() == 4 ? p[3] : 0.0;
            return sample(grid, [&](double x, double y) {
                double c = std::cos(kx * std::numbers::pi * (x - grid.lower(0)) / grid.extent[0]);
                if (grid.dim == 2) c *= std::cos(ky * std::numbers::pi * (y - grid.lower(1)) / grid.extent[1]);
                return p[0] + p[1] * c;
            });
        }
        case FieldSpec::Kind::random: {
            std::mt19937_64 rng(seed);
            Field f(grid);
            for (std::size_t c = 0; c < f.size(); ++c) f[c] = p[0] + (p[1] - p[0]) * unit_interval(rng());
            return f;
        }
        case FieldSpec::Kind::prototype:
            return sample_prototype_mu(grid, p[0], p[1]);
        case FieldSpec::Kind::file: {
            std::istringstream in(io::read_file(spec.path));
            std::vector<double> values;
            std::string word;
            while (in >> word) values.push_back(parse_number(word));
            if (values.size() != grid.cell_count()) {
                throw FieldSpecError(spec.path + " holds " + std::to_string(values.size()) + " values, grid has " +
                                     std::to_string(grid.cell_count()) + " cells");
            }
            return Field(grid, std::move(values));
        }
    }
    throw std::logic_error("unhandled field kind");
}

}  // namespace kslg
