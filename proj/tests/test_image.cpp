#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sureshrink/image.hpp"

using namespace sureshrink;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("load_pgm decodes a canonical P5 header and payload") {
    const auto path = temp_path("ss_p5_basic.pgm");
    write_bytes(path, std::string("P5\n2 2\n255\n") + '\x00' + '\x80' + '\xff' + '\x40');
    const GrayImage img = load_pgm(path);
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.at(0, 0) == 0.0);
    CHECK(img.at(0, 1) == 128.0);
    CHECK(img.at(1, 0) == 255.0);
    CHECK(img.at(1, 1) == 64.0);
    std::remove(path.c_str());
}

TEST_CASE("load_pgm decodes P2 and tolerates header comments") {
    const auto path = temp_path("ss_p2_comment.pgm");
    write_bytes(path, "P2\n# a comment line\n3 1\n# another\n255\n7 0 255\n");
    const GrayImage img = load_pgm(path);
    CHECK(img.width == 3);
    CHECK(img.height == 1);
    CHECK(img.at(0, 0) == 7.0);
    CHECK(img.at(0, 2) == 255.0);
    std::remove(path.c_str());
}

TEST_CASE("save/load round trip is byte-identical for canonical P5") {
    GrayImage img(3, 2);
    double vals[] = {0, 17, 255, 128, 64, 3};
    for (size_t i = 0; i < img.size(); ++i) img.data[i] = vals[i];
    const auto p1 = temp_path("ss_rt1.pgm");
    const auto p2 = temp_path("ss_rt2.pgm");
    save_pgm(img, p1);
    save_pgm(load_pgm(p1), p2);
    CHECK(read_bytes(p1) == read_bytes(p2));
    const GrayImage again = load_pgm(p2);
    for (size_t i = 0; i < img.size(); ++i) CHECK(again.data[i] == img.data[i]);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("save_pgm clamps and rounds half away from zero") {
    GrayImage img(4, 1);
    img.data = {255.7, -3.2, 127.5, 126.5};
    const auto path = temp_path("ss_save_rules.pgm");
    save_pgm(img, path);
    const GrayImage back = load_pgm(path);
    CHECK(back.at(0, 0) == 255.0);
    CHECK(back.at(0, 1) == 0.0);
    CHECK(back.at(0, 2) == 128.0);
    CHECK(back.at(0, 3) == 127.0);  // 126.5 rounds away from zero to 127
    std::remove(path.c_str());
}

TEST_CASE("PGM failure modes raise distinct error types") {
    const auto path = temp_path("ss_bad.pgm");

    CHECK_THROWS_AS(load_pgm(temp_path("ss_does_not_exist.pgm")), PgmIoError);

    write_bytes(path, "P6\n2 2\n255\n....");
    CHECK_THROWS_AS(load_pgm(path), PgmHeaderError);

    write_bytes(path, "P5\n2 x\n255\n");
    CHECK_THROWS_AS(load_pgm(path), PgmHeaderError);

    write_bytes(path, "P5\n2 2\n65535\n");
    CHECK_THROWS_AS(load_pgm(path), PgmMaxvalError);

    write_bytes(path, std::string("P5\n2 2\n255\n") + "\x01\x02\x03");  // one byte short
    CHECK_THROWS_AS(load_pgm(path), PgmTruncatedError);

    write_bytes(path, "P2\n2 2\n255\n1 2 3");
    CHECK_THROWS_AS(load_pgm(path), PgmTruncatedError);

    write_bytes(path, "P2\n2 2\n100\n1 2 3 512");
    CHECK_THROWS_AS(load_pgm(path), PgmValueError);

    std::remove(path.c_str());
}

TEST_CASE("pad_symmetric mirrors without repeating the edge") {
    GrayImage img(3, 3);
    img.data = {10, 20, 30,   // each row reads [a,b,c] -> padded [b,a,b,c,b]
                40, 50, 60,
                70, 80, 90};
    const GrayImage p = pad_symmetric(img, 1);
    CHECK(p.width == 5);
    CHECK(p.height == 5);
    // Middle source row, horizontally mirrored.
    CHECK(p.at(2, 0) == 50.0);
    CHECK(p.at(2, 1) == 40.0);
    CHECK(p.at(2, 2) == 50.0);
    CHECK(p.at(2, 3) == 60.0);
    CHECK(p.at(2, 4) == 50.0);
    // Vertical mirror: padded row 0 is source row 1, not row 0.
    CHECK(p.at(0, 1) == 40.0);
    CHECK(p.at(4, 1) == 40.0);
    // Corner combines both reflections: (-1,-1) -> (1,1).
    CHECK(p.at(0, 0) == 50.0);
}

TEST_CASE("pad_symmetric keeps the interior intact and stays in range") {
    GrayImage img(4, 3);
    for (size_t i = 0; i < img.size(); ++i) img.data[i] = static_cast<double>(i * 13 % 251);
    const int m = 2;
    const GrayImage p = pad_symmetric(img, m);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            CHECK(p.at(r + m, c + m) == img.at(r, c));
    double lo = 1e9, hi = -1e9;
    for (double v : img.data) { lo = std::min(lo, v); hi = std::max(hi, v); }
    for (double v : p.data) {
        CHECK(v >= lo);
        CHECK(v <= hi);
    }
}

TEST_CASE("pad_symmetric edge cases") {
    GrayImage one(1, 1, 42.0);
    const GrayImage same = pad_symmetric(one, 0);  // margin 0 is the identity
    CHECK(same.width == 1);
    CHECK(same.at(0, 0) == 42.0);

    // A margin as large as a dimension would need the reflection to fold
    // more than once; that is rejected.
    CHECK_THROWS_AS(pad_symmetric(one, 1), std::invalid_argument);
    GrayImage thin(5, 2, 1.0);
    CHECK_THROWS_AS(pad_symmetric(thin, 2), std::invalid_argument);
    CHECK_NOTHROW(pad_symmetric(thin, 1));
}
