#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "lpsup/gaussian_paths.hpp"
#include "lpsup/json_io.hpp"

namespace lpsup {

static_assert(std::endian::native == std::endian::little, "ensemble dumps assume a little-endian host");

void write_ensemble(const PathEnsemble& ens, const std::string& prefix) {
    std::ofstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin for writing");
    bin.write(reinterpret_cast<const char*>(ens.values.data()),
              static_cast<std::streamsize>(ens.values.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("short write to " + prefix + ".bin");

    nlohmann::ordered_json side;
    side["format"] = "f8-le";
    side["layout"] = "row-major [path][component][k]";
    side["shape"] = {ens.n_paths, ens.n_components, ens.points()};
    side["T"] = ens.times.back();
    side["N"] = ens.points() - 1;
    side["model"] = to_json(ens.model);
    side["seed"] = ens.seed;
    side["chunk_paths"] = ens.chunk_paths;
    side["stream_rule"] = "stream = (component << 32) | chunk, chunk = path / chunk_paths";
    std::ofstream js(prefix + ".json");
    if (!js) throw std::runtime_error("cannot open " + prefix + ".json for writing");
    js << side.dump(2) << "\n";
}

PathEnsemble read_ensemble(const std::string& prefix) {
    std::ifstream js(prefix + ".json");
    if (!js) throw std::runtime_error("cannot open " + prefix + ".json");
    const auto side = nlohmann::json::parse(js);
    PathEnsemble ens;
    ens.model = model_from_json(side.at("model"));
    ens.seed = side.at("seed").get<std::uint64_t>();
    ens.chunk_paths = side.at("chunk_paths").get<std::size_t>();
    const auto shape = side.at("shape");
    ens.n_paths = shape.at(0).get<std::size_t>();
    ens.n_components = shape.at(1).get<std::size_t>();
    const std::size_t points = shape.at(2).get<std::size_t>();
    const double T = side.at("T").get<double>();
    const std::size_t N = points - 1;
    ens.times.resize(points);
    for (std::size_t k = 0; k < points; ++k) ens.times[k] = T * static_cast<double>(k) / static_cast<double>(N);

    ens.values.resize(ens.n_paths * ens.n_components * points);
    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin");
    bin.read(reinterpret_cast<char*>(ens.values.data()), static_cast<std::streamsize>(ens.values.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(ens.values.size() * sizeof(double))) {
        throw std::runtime_error(prefix + ".bin is shorter than its sidecar shape");
    }
    return ens;
}

}  // namespace lpsup
