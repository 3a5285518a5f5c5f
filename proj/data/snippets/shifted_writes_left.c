const int N = 63;

void shifted(int v[64])
{
    int i;
    for (i = 1; i < N; i += 2) {
        v[i] = v[i - 1];
        v[i + 1] = v[i - 1] * i;
    }
}
