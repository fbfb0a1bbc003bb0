#pragma once

namespace soup::testing {

struct KindPair {
    const char* kind;
    const char* violating;
    const char* safe;
};

// One violating / safe program pair per core property kind.  Each violating
// program is written so only the named kind can fail.
inline const KindPair kKindPairs[] = {
    {"null-deref",
     "void f() {\n    u8* p = NULL;\n    p[0] = 1;\n}\n",
     "void f() {\n    u8* p = NULL;\n    if (p != NULL) {\n        p[0] = 1;\n    }\n}\n"},
    {"invalid-deref",
     "void f() {\n    u8* p;\n    p[0] = 1;\n}\n",
     "void f() {\n    u8 a[2];\n    u8* p = a;\n    p[0] = 1;\n}\n"},
    {"deallocated-deref",
     "void f() {\n    u8* p = malloc(4);\n    assume(p != NULL);\n    free(p);\n    p[0] = 1;\n}\n",
     "void f() {\n    u8* p = malloc(4);\n    assume(p != NULL);\n    p[0] = 1;\n    free(p);\n}\n"},
    {"dead-object-deref",
     "u8* make() {\n    u8 buf[4];\n    return buf;\n}\nvoid f() {\n    u8* p = make();\n    p[0] = 1;\n}\n",
     "u8* make() {\n    u8* buf = malloc(4);\n    assume(buf != NULL);\n    return buf;\n}\nvoid f() {\n    u8* p = make();\n    p[0] = 1;\n}\n"},
    {"oob-pointer-deref",
     "void f() {\n    u8* p = malloc(2);\n    assume(p != NULL);\n    p[2] = 1;\n}\n",
     "void f() {\n    u8* p = malloc(2);\n    assume(p != NULL);\n    p[1] = 1;\n}\n"},
    {"array-lower-bound",
     "void f(i32 x) {\n    u8 a[4];\n    assume(x < 4);\n    a[x] = 1;\n}\n",
     "void f(i32 x) {\n    u8 a[4];\n    assume(x >= 0);\n    assume(x < 4);\n    a[x] = 1;\n}\n"},
    {"array-upper-bound",
     "void f(i32 x) {\n    u8 a[4];\n    assume(x >= 0);\n    a[x] = 1;\n}\n",
     "void f(i32 x) {\n    u8 a[4];\n    assume(x >= 0);\n    assume(x <= 3);\n    a[x] = 1;\n}\n"},
    {"signed-overflow-add",
     "void f(i32 a) {\n    assume(a >= 0);\n    i32 y = a + 1;\n}\n",
     "void f(i32 a) {\n    assume(a >= 0);\n    assume(a <= 1000);\n    i32 y = a + 1;\n}\n"},
    {"signed-overflow-sub",
     "void f(i32 a) {\n    assume(a <= 0);\n    i32 y = a - 1;\n}\n",
     "void f(i32 a) {\n    assume(a >= 0);\n    i32 y = a - 1;\n}\n"},
    {"signed-overflow-mul",
     "void f(i32 a) {\n    assume(a >= 0);\n    i32 y = a * 2;\n}\n",
     "void f(i32 a) {\n    assume(a >= 0);\n    assume(a <= 1000);\n    i32 y = a * 2;\n}\n"},
    {"shift-distance-negative",
     "void f(i32 a) {\n    assume(a < 16);\n    i32 y = 1 << a;\n}\n",
     "void f(i32 a) {\n    assume(a >= 0);\n    assume(a < 16);\n    i32 y = 1 << a;\n}\n"},
    {"shift-distance-too-large",
     "void f(i32 a) {\n    assume(a >= 0);\n    i32 y = 1 << a;\n}\n",
     "void f(i32 a) {\n    assume(a >= 0);\n    assume(a < 32);\n    i32 y = 1 << a;\n}\n"},
    {"div-by-zero",
     "void f(i32 a) {\n    i32 y = 10 / a;\n}\n",
     "void f(i32 a) {\n    assume(a > 0);\n    i32 y = 10 / a;\n}\n"},
    {"memcpy-src-readable",
     "void f() {\n    u8 a[2];\n    u8 b[8];\n    memcpy(b, a, 4);\n}\n",
     "void f() {\n    u8 a[2];\n    u8 b[8];\n    memcpy(b, a, 2);\n}\n"},
    {"memcpy-dst-writeable",
     "void f() {\n    u8 a[8];\n    u8 b[2];\n    memcpy(b, a, 4);\n}\n",
     "void f() {\n    u8 a[8];\n    u8 b[2];\n    memcpy(b, a, 2);\n}\n"},
    {"memcpy-overlap",
     "void f() {\n    u8 a[8];\n    memcpy(a, a, 4);\n}\n",
     "void f() {\n    u8 a[8];\n    u8 b[8];\n    memcpy(b, a, 4);\n}\n"},
    {"memset-dst-writeable",
     "void f() {\n    u8 b[2];\n    memset(b, 0, 4);\n}\n",
     "void f() {\n    u8 b[2];\n    memset(b, 0, 2);\n}\n"},
    {"free-offset-zero",
     "void f() {\n    u8* p = malloc(4);\n    assume(p != NULL);\n    free(p + 1);\n}\n",
     "void f() {\n    u8* p = malloc(4);\n    assume(p != NULL);\n    free(p);\n}\n"},
    {"free-dynamic",
     "void f() {\n    u8 a[4];\n    free(a);\n}\n",
     "void f() {\n    u8* p = malloc(4);\n    assume(p != NULL);\n    free(p);\n}\n"},
    {"double-free",
     "void f() {\n    u8* p = malloc(4);\n    assume(p != NULL);\n    free(p);\n    free(p);\n}\n",
     "void f() {\n    u8* p = malloc(4);\n    assume(p != NULL);\n    free(p);\n}\n"},
};

} // namespace soup::testing
