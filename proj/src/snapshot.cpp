#include "coalbench/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "coalbench/errors.hpp"

namespace coalbench {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");
static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559,
              "snapshot format assumes IEEE-754 binary64");

constexpr char kMagic[8] = {'C', 'B', 'S', 'N', 'A', 'P', '0', '1'};
constexpr std::uint32_t kVersion = 1;

void put(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void get(std::ifstream& in, void* data, std::size_t bytes, const char* what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (in.gcount() != static_cast<std::streamsize>(bytes))
        throw ConfigError(std::string("snapshot: truncated while reading ") + what);
}

template <typename T>
void put_value(std::ofstream& out, T v) {
    put(out, &v, sizeof(T));
}

template <typename T>
T get_value(std::ifstream& in, const char* what) {
    T v;
    get(in, &v, sizeof(T), what);
    return v;
}

} // namespace

void write_snapshot(const GridState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("snapshot: cannot open '" + path + "' for writing");

    put(out, kMagic, sizeof(kMagic));
    put_value(out, kVersion);
    put_value(out, static_cast<std::uint32_t>(state.nkr()));
    const Ranges& r = state.ranges;
    for (int v : {r.ids, r.ide, r.kds, r.kde, r.jds, r.jde})
        put_value(out, static_cast<std::int32_t>(v));
    put_value(out, state.grid.ratio);
    put_value(out, static_cast<std::uint32_t>(kNumCategories));
    for (int c = 0; c < kNumCategories; ++c) {
        const std::string name = category_name(static_cast<Category>(c));
        put_value(out, static_cast<std::uint32_t>(name.size()));
        put(out, name.data(), name.size());
    }
    put(out, state.grid.x.data(), state.grid.x.size() * sizeof(double));
    put(out, state.temperature.data(), state.temperature.size() * sizeof(double));
    put(out, state.pressure.data(), state.pressure.size() * sizeof(double));
    for (int c = 0; c < kNumCategories; ++c)
        put(out, state.bins[c].data(), state.bins[c].size() * sizeof(double));

    out.flush();
    if (!out)
        throw ConfigError("snapshot: write to '" + path + "' failed");
}

GridState read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("snapshot: cannot open '" + path + "'");

    char magic[8];
    get(in, magic, sizeof(magic), "magic");
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ConfigError("snapshot: '" + path + "' is not a coalbench snapshot");
    if (get_value<std::uint32_t>(in, "version") != kVersion)
        throw ConfigError("snapshot: unsupported version in '" + path + "'");

    const auto nkr = get_value<std::uint32_t>(in, "nkr");
    if (nkr < 2 || nkr > 100000)
        throw ConfigError("snapshot: implausible nkr");

    GridState state;
    Ranges& r = state.ranges;
    r.ids = get_value<std::int32_t>(in, "ids");
    r.ide = get_value<std::int32_t>(in, "ide");
    r.kds = get_value<std::int32_t>(in, "kds");
    r.kde = get_value<std::int32_t>(in, "kde");
    r.jds = get_value<std::int32_t>(in, "jds");
    r.jde = get_value<std::int32_t>(in, "jde");
    if (r.ide < r.ids || r.kde < r.kds || r.jde < r.jds)
        throw ConfigError("snapshot: invalid domain ranges");

    state.grid.ratio = get_value<double>(in, "ratio");

    const auto ncat = get_value<std::uint32_t>(in, "category count");
    if (ncat != kNumCategories)
        throw ConfigError("snapshot: expected " + std::to_string(kNumCategories) +
                          " categories, found " + std::to_string(ncat));
    for (int c = 0; c < kNumCategories; ++c) {
        const auto len = get_value<std::uint32_t>(in, "category name length");
        if (len > 64)
            throw ConfigError("snapshot: implausible category name");
        std::string name(len, '\0');
        get(in, name.data(), len, "category name");
        if (name != category_name(static_cast<Category>(c)))
            throw ConfigError("snapshot: unexpected category '" + name + "'");
    }

    const std::size_t npoints = r.npoints();
    state.grid.x.resize(nkr);
    get(in, state.grid.x.data(), nkr * sizeof(double), "mass grid");
    state.temperature.resize(npoints);
    get(in, state.temperature.data(), npoints * sizeof(double), "temperature");
    state.pressure.resize(npoints);
    get(in, state.pressure.data(), npoints * sizeof(double), "pressure");
    for (int c = 0; c < kNumCategories; ++c) {
        state.bins[c].resize(npoints * nkr);
        get(in, state.bins[c].data(), npoints * nkr * sizeof(double), "bins");
    }

    char extra;
    in.read(&extra, 1);
    if (!in.eof())
        throw ConfigError("snapshot: trailing bytes in '" + path + "'");
    return state;
}

} // namespace coalbench
