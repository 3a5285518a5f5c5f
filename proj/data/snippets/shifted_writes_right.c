const int N = 63;

void shifted(int v[64])
{
    int i;
    for (i = 0; i < N; i++) {
        v[i + 1] = v[i] * i;
    }
}
