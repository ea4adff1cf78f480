#include <doctest.h>

#include <cmath>
#include <fstream>

#include "parttrack/pgm_io.hpp"
#include "test_support.hpp"

using namespace parttrack;
using test::TempDir;

TEST_CASE("depth PGM round trip is exact at millimeter quantization") {
    TempDir dir("parttrack_pgm_depth");
    DepthImage img(5, 3);
    img.set(0, 0, 0.001f);
    img.set(4, 2, 9.999f);
    img.set(2, 1, 1.9505f);
    const std::string path = (dir.path() / "d.pgm").string();
    write_depth_pgm(path, img);
    const DepthImage back = read_depth_pgm(path);
    REQUIRE(back.width() == 5);
    REQUIRE(back.height() == 3);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 5; ++x) {
            CHECK(std::abs(back.at(x, y) - img.at(x, y)) <= 0.0005 + 1e-7);
        }
    }
}

TEST_CASE("depth values survive a write/read cycle within half a millimeter") {
    TempDir dir("parttrack_pgm_depth2");
    DepthImage img(16, 16);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) img.set(x, y, 0.05f + 0.037f * (y * 16 + x));
    }
    const std::string path = (dir.path() / "d.pgm").string();
    write_depth_pgm(path, img);
    const DepthImage back = read_depth_pgm(path);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            CHECK(std::abs(back.at(x, y) - img.at(x, y)) <= 0.0005 + 1e-7);
        }
    }
    // A second cycle through the quantized raster is bit-exact.
    const std::string path2 = (dir.path() / "d2.pgm").string();
    write_depth_pgm(path2, back);
    CHECK(read_depth_pgm(path2).data() == back.data());
}

TEST_CASE("invalid depth pixels stay invalid through the file format") {
    TempDir dir("parttrack_pgm_invalid");
    DepthImage img(3, 1);
    img.set(1, 0, 2.0f);
    const std::string path = (dir.path() / "d.pgm").string();
    write_depth_pgm(path, img);
    const DepthImage back = read_depth_pgm(path);
    CHECK(!back.valid(0, 0));
    CHECK(back.valid(1, 0));
    CHECK(!back.valid(2, 0));
}

TEST_CASE("label PGM round trip is exact") {
    TempDir dir("parttrack_pgm_label");
    LabelImage labels(4, 2);
    labels.set(0, 0, 1);
    labels.set(1, 0, 2);
    labels.set(2, 0, 3);
    labels.set(3, 1, 4);
    const std::string path = (dir.path() / "l.pgm").string();
    write_label_pgm(path, labels);
    const LabelImage back = read_label_pgm(path);
    CHECK(back.data() == labels.data());
}

TEST_CASE("malformed PGM files are rejected") {
    TempDir dir("parttrack_pgm_bad");
    auto write_file = [&](const char* name, const std::string& body) {
        const std::string path = (dir.path() / name).string();
        std::ofstream out(path, std::ios::binary);
        out << body;
        return path;
    };
    CHECK_THROWS_AS(read_depth_pgm((dir.path() / "missing.pgm").string()), IoError);
    CHECK_THROWS_AS(read_depth_pgm(write_file("p2.pgm", "P2\n2 2\n65535\n0 0 0 0\n")), IoError);
    CHECK_THROWS_AS(read_depth_pgm(write_file("trunc.pgm", std::string("P5\n4 4\n65535\n\x01\x02", 15))),
                    IoError);
    CHECK_THROWS_AS(read_depth_pgm(write_file("dims.pgm", "P5\n0 4\n65535\n")), IoError);
    CHECK_THROWS_AS(read_depth_pgm(write_file("junk.pgm", "P5\nfour 4\n65535\n")), IoError);
    // Depth rasters must be 16-bit, label rasters 8-bit.
    CHECK_THROWS_AS(read_depth_pgm(write_file("max8.pgm", std::string("P5\n1 1\n255\nA"))), IoError);
    CHECK_THROWS_AS(read_label_pgm(write_file("max16.pgm", std::string("P5\n1 1\n65535\nAB"))),
                    IoError);
    // Label values above 4 are out of range for this pipeline.
    CHECK_THROWS_AS(read_label_pgm(write_file("label9.pgm", std::string("P5\n1 1\n255\n\x09"))),
                    IoError);
}

TEST_CASE("PGM header comments are tolerated") {
    TempDir dir("parttrack_pgm_comment");
    const std::string path = (dir.path() / "c.pgm").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n# made by hand\n2 1\n255\n";
        out.put(1);
        out.put(4);
    }
    const LabelImage labels = read_label_pgm(path);
    CHECK(labels.at(0, 0) == 1);
    CHECK(labels.at(1, 0) == 4);
}
