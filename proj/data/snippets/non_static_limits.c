const int N = 64;

void non_static(int v[64])
{
    int i;
    int j;
    for (i = 0; i < N; i++) {
        for (j = 0; j < size(v); j++) {
            update(v[j]);
        }
        clean(v);
    }
}
