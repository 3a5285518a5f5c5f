const int N = 512;
int total;

void histogram(int data[512], int bins[16])
{
    int i;
    total = 0;
    for (i = 0; i < N; i++) {
        bins[data[i] % 16] = bins[data[i] % 16] + 1;
        total = total + 1;
    }
}
