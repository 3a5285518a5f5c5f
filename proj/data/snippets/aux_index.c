const int N = 64;

void aux_index(int w[64], int v[64], int i)
{
    int aux;
    int j;
    aux = 0;
    for (j = 0; j < N; j++) {
        w[i] = v[aux];
        aux++;
    }
}
