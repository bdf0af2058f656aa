// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "luthier/conversation.hpp"
#include "luthier/pack.hpp"

using namespace luthier;

namespace {

std::vector<PackItem> items(std::initializer_list<std::uint64_t> tokens) {
    std::vector<PackItem> v;
    int i = 0;
    for (auto t : tokens) v.push_back({"s" + std::to_string(i++), t});
    return v;
}

std::vector<std::uint64_t> used_of(const std::vector<PackedBatch>& b) {
    std::vector<std::uint64_t> u;
    for (const auto& x : b) u.push_back(x.used);
    return u;
}

}  // namespace

TEST_SUITE("pack") {
    TEST_CASE("token counting") {
        Conversation c;
        c.source = "s";
        c.messages = {{Role::User, ""}};
        TokenCounter bytes;
        CHECK(count_tokens(c, bytes) == 8);
        c.messages = {{Role::User, std::string(32, 'a')}};
        CHECK(count_tokens(c, bytes) == 18);
        c.messages = {{Role::User, std::string(33, 'a')}, {Role::Assistant, "é"}};
        CHECK(count_tokens(c, bytes) == 11 + 16);
        TokenCounter pre = TokenCounter::parse("precomputed");
        CHECK_THROWS_AS(count_tokens(c, pre), InputError);
        c.token_count = 1234;
        CHECK(count_tokens(c, pre) == 1234);
        CHECK(TokenCounter::parse("byte:4").bytes_per_token == 4.0);
        CHECK(TokenCounter::parse("byte:3.2").to_string() == "byte:3.2");
        CHECK_THROWS_AS(TokenCounter::parse("byte:0"), ConfigError);
        CHECK_THROWS_AS(TokenCounter::parse("tiktoken"), ConfigError);
    }

    TEST_CASE("hand-traced example") {
        const auto b = pack_ffd(items({9000, 8000, 7000, 300}), 16384);
        REQUIRE(b.size() == 2);
        CHECK(used_of(b) == std::vector<std::uint64_t>{16300, 8000});
        CHECK(b[0].items == std::vector<PackItem>{{"s0", 9000}, {"s2", 7000}, {"s3", 300}});
        CHECK(b[1].items == std::vector<PackItem>{{"s1", 8000}});
        const auto r = pack_report(b);
        CHECK(r.batch_count == 2);
        CHECK(*r.mean_utilization == doctest::Approx((16300.0 / 16384 + 8000.0 / 16384) / 2));
        CHECK(*r.min_utilization == doctest::Approx(8000.0 / 16384));
    }

    TEST_CASE("trivial cases") {
        const auto full = pack_ffd(items({100, 100, 100}), 100);
        CHECK(full.size() == 3);
        CHECK(*pack_report({full[0]}).mean_utilization == 1.0);
        CHECK(pack_ffd({}, 100).empty());
        const auto empty = pack_report({});
        CHECK(empty.batch_count == 0);
        CHECK_FALSE(empty.mean_utilization.has_value());
        CHECK_THROWS_WITH_AS(pack_ffd(items({10, 101}), 100), doctest::Contains("s1"), InputError);
        CHECK_THROWS(pack_ffd(items({1}), 0));
    }

    TEST_CASE("order independence") {
        std::mt19937 rng(4);
        std::vector<PackItem> v;
        for (int i = 0; i < 200; ++i) v.push_back({"id" + std::to_string(i), 1 + rng() % 900});
        const auto a = pack_ffd(v, 1000);
        std::shuffle(v.begin(), v.end(), rng);
        const auto b = pack_ffd(v, 1000);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].items == b[i].items);
    }

    TEST_CASE("json shape") {
        const auto b = pack_ffd(items({5}), 10);
        CHECK(b[0].to_json().dump() == R"({"capacity":10,"used":5,"items":[{"id":"s0","tokens":5}]})");
    }
}
