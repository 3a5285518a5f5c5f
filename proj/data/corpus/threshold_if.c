const int N = 2048;

void threshold(int v[2048], int lo, int hi)
{
    int i;
    for (i = 0; i < N; i++) {
        if (v[i] < lo) {
            v[i] = lo;
        } else {
            if (v[i] > hi)
                v[i] = hi;
        }
    }
}
