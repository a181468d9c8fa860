#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fate/dataset.hpp"
#include "fate/rng.hpp"

namespace fate::test {

// Dataset with explicit (y,a) cell layout and simple numeric features.
inline Dataset make_cells(const std::vector<std::pair<int, int>>& ya,
                          const std::vector<double>& feature = {}) {
    Dataset ds;
    ds.x = Matrix(ya.size(), 2);
    ds.feature_names = {"f1", "f2"};
    ds.col_group = {-1, -1};
    for (std::size_t i = 0; i < ya.size(); ++i) {
        ds.y.push_back(ya[i].first);
        ds.a.push_back(ya[i].second);
        ds.w.push_back(1.0);
        ds.x.at(i, 0) = feature.empty() ? static_cast<double>(i) : feature[i];
        ds.x.at(i, 1) = static_cast<double>(ya[i].first) - 0.5 * ya[i].second;
    }
    return ds;
}

// n rows with all four (y,a) cells populated and noisy informative features.
inline Dataset random_dataset(std::size_t n, std::uint64_t seed, std::size_t extra_cols = 0) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    Dataset ds;
    const std::size_t d = 2 + extra_cols;
    ds.x = Matrix(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        ds.feature_names.push_back("f" + std::to_string(j));
        ds.col_group.push_back(-1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i % 2;                    // guarantees every cell once n >= 4
        const int a = (i / 2) % 2;
        ds.y.push_back(y);
        ds.a.push_back(a);
        ds.w.push_back(1.0);
        for (std::size_t j = 0; j < d; ++j) {
            ds.x.at(i, j) = y * 1.2 + 0.3 * a + noise(rng);
        }
    }
    (void)coin;
    return ds;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("fate_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string path() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace fate::test
