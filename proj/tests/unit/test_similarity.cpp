#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/similarity.hpp"
#include "core/textio.hpp"

using namespace stepsvm;

namespace {

Dataset wrap(const Matrix& x, const std::vector<int>& labels,
             const std::vector<std::string>& names = {}) {
    Dataset d;
    d.features = x;
    d.labels = labels;
    for (std::size_t j = 0; j < x.cols(); ++j)
        d.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < x.rows(); ++i)
        d.sample_names.push_back(names.empty() ? "s" + std::to_string(i) : names[i]);
    int k = 1 + *std::max_element(labels.begin(), labels.end());
    for (int c = 0; c < k; ++c)
        d.class_names.push_back("c" + std::to_string(c));
    return d;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("distances follow the euclidean definition") {
    Matrix x = Matrix::from_rows({{0, 0}, {3, 4}, {0, 0}});
    Dataset d = wrap(x, {0, 1, 0});
    DistanceMatrix dm = distance_matrix(d);
    CHECK(dm.values(0, 1) == doctest::Approx(5.0)); // 3-4-5
    CHECK(dm.values(0, 2) == 0.0);                  // identical rows
    CHECK(dm.values(1, 1) == 0.0);
    CHECK(dm.feature_subset_label == "all");
}

TEST_CASE("restricting coordinates never increases a distance") {
    Rng rng(6);
    Matrix x(10, 8);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            x(i, j) = rng.next_normal();
    std::vector<int> labels(10);
    for (std::size_t i = 0; i < 10; ++i)
        labels[i] = static_cast<int>(i % 2);
    Dataset d = wrap(x, labels);

    DistanceMatrix full = distance_matrix(d);
    std::vector<std::size_t> subset{1, 3, 6};
    DistanceMatrix part = distance_matrix(d, subset);
    CHECK(part.feature_subset_label == "subset:3");
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j)
            CHECK(part.values(i, j) <= full.values(i, j) + 1e-12);

    std::vector<std::size_t> bad{9};
    CHECK_THROWS_AS(distance_matrix(d, bad), validation_error);
}

TEST_CASE("group contrast separates planted clusters") {
    Rng rng(9);
    std::size_t n = 30;
    Matrix x(n, 4);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(i % 2);
        for (std::size_t j = 0; j < 4; ++j)
            x(i, j) = rng.next_normal() + (labels[i] == 0 ? -5.0 : 5.0);
    }
    Dataset d = wrap(x, labels);
    DistanceMatrix dm = distance_matrix(d);
    CHECK(group_contrast(dm) > 3.0);

    // Uniformly shuffled labels should land near 1 on average.
    Rng shuffle_rng(77);
    std::vector<double> contrasts;
    std::vector<int> shuffled = labels;
    for (int rep = 0; rep < 100; ++rep) {
        shuffle_rng.shuffle(shuffled);
        contrasts.push_back(group_contrast(dm, shuffled));
    }
    auto ms = mean_sd(contrasts);
    double se = ms.sd / std::sqrt(100.0);
    CHECK(std::abs(ms.mean - 1.0) <= 3.0 * se + 1e-9);
}

TEST_CASE("contrast is undefined without within-class pairs") {
    Matrix x = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
    Dataset d = wrap(x, {0, 1, 2});
    DistanceMatrix dm = distance_matrix(d);
    CHECK_THROWS_AS(group_contrast(dm), validation_error);

    Dataset single = wrap(x, {0, 0, 0});
    DistanceMatrix dm2 = distance_matrix(single);
    CHECK_THROWS_AS(group_contrast(dm2), validation_error);
}

TEST_CASE("csv export bytes are pinned for a 2x2 matrix") {
    Matrix x = Matrix::from_rows({{0.0}, {1.0}});
    Dataset d = wrap(x, {0, 1}, {"a", "b"});
    DistanceMatrix dm = distance_matrix(d);
    auto path = (std::filesystem::temp_directory_path() / "stepsvm_dm.csv").string();
    write_distance_csv(dm, path, false);
    CHECK(read_all(path) == ",a,b\na,0,1\nb,1,0\n");
    std::remove(path.c_str());
}

TEST_CASE("reordering groups classes contiguously") {
    Matrix x = Matrix::from_rows({{0.0}, {10.0}, {0.1}, {10.1}});
    Dataset d = wrap(x, {0, 1, 0, 1}, {"w", "x", "y", "z"});
    DistanceMatrix dm = distance_matrix(d);
    auto path = (std::filesystem::temp_directory_path() / "stepsvm_dm2.csv").string();
    write_distance_csv(dm, path, true);
    std::string contents = read_all(path);
    CHECK(contents.substr(0, contents.find('\n')) == ",w,y,x,z");
    std::remove(path.c_str());
}

TEST_CASE("csv round-trips values through 17 significant digits") {
    Rng rng(123);
    Matrix x(5, 3);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            x(i, j) = rng.next_normal();
    std::vector<int> labels{0, 1, 0, 1, 0};
    Dataset d = wrap(x, labels);
    DistanceMatrix dm = distance_matrix(d);
    auto path = (std::filesystem::temp_directory_path() / "stepsvm_dm3.csv").string();
    write_distance_csv(dm, path, false);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line); // header
    for (std::size_t i = 0; i < 5; ++i) {
        std::getline(in, line);
        auto cells = split(line, ',');
        REQUIRE(cells.size() == 6);
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(*parse_double(cells[j + 1]) == dm.values(i, j));
    }
    std::remove(path.c_str());
}

TEST_CASE("pgm export maps min to white and max to black") {
    Matrix x = Matrix::from_rows({{0.0}, {1.0}});
    Dataset d = wrap(x, {0, 1});
    DistanceMatrix dm = distance_matrix(d);
    auto path = (std::filesystem::temp_directory_path() / "stepsvm_dm.pgm").string();
    write_distance_pgm(dm, path, false);
    std::string contents = read_all(path);
    CHECK(contents.substr(0, 9) == "P5\n2 2\n25"); // "P5\n2 2\n255\n"
    std::string pixels = contents.substr(contents.size() - 4);
    CHECK(static_cast<unsigned char>(pixels[0]) == 255); // diagonal, min
    CHECK(static_cast<unsigned char>(pixels[1]) == 0);   // max distance
    CHECK(static_cast<unsigned char>(pixels[2]) == 0);
    CHECK(static_cast<unsigned char>(pixels[3]) == 255);
    std::remove(path.c_str());
}
